#include "dpsim/assembly.hpp"

#include "dpsim/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

namespace dpsim {

namespace {

constexpr double kConv = UnitConstants::ft3_per_bbl;

double clamp_abs(double v, double limit) { return std::clamp(v, -limit, limit); }

}  // namespace

AccumulationResult accumulation(double volume, const RockCompressibility& rock, const ContinuumCell& now,
                                const ContinuumCell& old, double dt, const FluidProps& fluid,
                                const SatFuncTable& table)
{
    using A = Ad<2>;
    const A p = A::variable(now.p, 0);
    const A s = A::variable(now.s_w, 1);
    const auto phi_now = porosity(now.p, rock);
    const A phi = chain(ValueDeriv{phi_now.value, phi_now.deriv}, p);
    const auto e = eval_phases<2>(p, s, table, fluid);

    const double phi_old = porosity(old.p, rock).value;
    const double pc_old = table.evaluate(old.s_w).p_cow;
    const double rho_o_old = oil_density(old.p, fluid.oil).value;
    const double rho_w_old = water_density(old.p - pc_old, fluid.water).value;

    const double f = volume / dt;
    AccumulationResult r;
    r.clamped = phi_now.clamped;
    r.term[Oil] = f * (phi * (1.0 - s) * e.density[Oil]) + (-f * (phi_old * (1.0 - old.s_w) * rho_o_old));
    r.term[Water] = f * (phi * s * e.density[Water]) + (-f * (phi_old * old.s_w * rho_w_old));
    return r;
}

FluxResult fracture_flux(const Connection& conn, const ContinuumCell& ci, const ContinuumCell& cj,
                         const FluidProps& fluid, const SatFuncTable& table, double gravity)
{
    using A = Ad<4>;
    const auto ei = eval_phases<4>(A::variable(ci.p, 0), A::variable(ci.s_w, 1), table, fluid);
    const auto ej = eval_phases<4>(A::variable(cj.p, 2), A::variable(cj.s_w, 3), table, fluid);
    const double dz = conn.depth_j - conn.depth_i;
    FluxResult r;
    for (int a = 0; a < 2; ++a) {
        const A rho_bar = 0.5 * (ei.density[a] + ej.density[a]);
        const A dphi = (ej.pressure[a] - ei.pressure[a]) - (gravity * dz) * rho_bar;
        const A& mob = dphi.v > 0.0 ? ej.mobility[a] : ei.mobility[a];
        r.into_i[a] = (kConv * conn.trans) * (mob * dphi);
    }
    return r;
}

TransferResult transfer_term(double sigma, double k_m, double volume, const ContinuumCell& frac,
                             const ContinuumCell& matrix, const FluidProps& fluid, const SatFuncTable& frac_table,
                             const SatFuncTable& matrix_table)
{
    using A = Ad<4>;
    const auto ef = eval_phases<4>(A::variable(frac.p, 0), A::variable(frac.s_w, 1), frac_table, fluid);
    const auto em = eval_phases<4>(A::variable(matrix.p, 2), A::variable(matrix.s_w, 3), matrix_table, fluid);
    const double coef = kConv * UnitConstants::darcy * sigma * k_m * volume;
    TransferResult r;
    for (int a = 0; a < 2; ++a) {
        const A dp = ef.pressure[a] - em.pressure[a];
        const A& mob = dp.v > 0.0 ? ef.mobility[a] : em.mobility[a];
        r.to_matrix[a] = coef * (mob * dp);
    }
    return r;
}

// --- FlowModel ----------------------------------------------------------------

FlowModel::FlowModel(ModelInputs in) : in_(std::move(in))
{
    if (in_.grid == nullptr)
        throw std::invalid_argument("flow model needs a grid");
    if (in_.frac_table.empty() || in_.matrix_table.empty())
        throw std::invalid_argument("flow model needs saturation tables");
    const std::size_t nc = num_cells();
    cell_perfs_.resize(nc);
    for (std::size_t w = 0; w < in_.wells.size(); ++w) {
        const auto& perfs = in_.wells[w].spec.perforations;
        for (std::size_t k = 0; k < perfs.size(); ++k) {
            if (perfs[k].cell >= nc)
                throw std::out_of_range("perforation outside the grid in well " + in_.wells[w].spec.name);
            cell_perfs_[perfs[k].cell].emplace_back(w, k);
        }
    }
    rho_mix_.assign(in_.wells.size(), 0.0);
}

void FlowModel::build_pattern(int bs)
{
    const std::size_t nc = num_cells(), nw = num_wells();
    std::vector<std::vector<std::size_t>> pattern(nc + nw);
    const auto& conns = grid().connections();
    for (const auto& c : conns) {
        pattern[c.cell_i].push_back(c.cell_j);
        pattern[c.cell_j].push_back(c.cell_i);
    }
    for (std::size_t w = 0; w < nw; ++w)
        for (const auto& perf : in_.wells[w].spec.perforations) {
            pattern[perf.cell].push_back(nc + w);
            pattern[nc + w].push_back(perf.cell);
        }
    pattern_ = BlockMatrix(bs, nc, nw, std::move(pattern));

    conn_pos_ij_.resize(conns.size());
    conn_pos_ji_.resize(conns.size());
    for (std::size_t k = 0; k < conns.size(); ++k) {
        conn_pos_ij_[k] = pattern_.find(conns[k].cell_i, conns[k].cell_j);
        conn_pos_ji_[k] = pattern_.find(conns[k].cell_j, conns[k].cell_i);
    }
    perf_pos_cw_.assign(nw, {});
    perf_pos_wc_.assign(nw, {});
    for (std::size_t w = 0; w < nw; ++w)
        for (const auto& perf : in_.wells[w].spec.perforations) {
            perf_pos_cw_[w].push_back(pattern_.find(perf.cell, nc + w));
            perf_pos_wc_[w].push_back(pattern_.find(nc + w, perf.cell));
        }
}

LinearSystem FlowModel::make_system() const
{
    LinearSystem sys;
    sys.jacobian = pattern_;
    sys.residual.assign(num_unknowns(), 0.0);
    sys.row_scale.assign(num_cells(), 1.0);
    return sys;
}

void FlowModel::update_well_densities(const State& x)
{
    const auto& fluid = in_.fluid;
    for (std::size_t w = 0; w < num_wells(); ++w) {
        const Well& well = in_.wells[w];
        if (well.spec.kind == WellKind::Injector) {
            rho_mix_[w] = water_density(x.bhp[w], fluid.water).value;
            continue;
        }
        // Inflow-weighted density assuming a uniform drawdown over the perforations.
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < well.spec.perforations.size(); ++k) {
            const std::size_t c = well.spec.perforations[k].cell;
            const auto sf = in_.frac_table.evaluate(x.s_wf(c));
            const double rho_o = oil_density(x.p_f(c), fluid.oil).value;
            const double rho_w = water_density(x.p_f(c) - sf.p_cow, fluid.water).value;
            const double lo = well.wi[k] * sf.k_ro / fluid.oil.viscosity;
            const double lw = well.wi[k] * sf.k_rw / fluid.water.viscosity;
            num += lo * rho_o + lw * rho_w;
            den += lo + lw;
        }
        if (den > 0.0) {
            rho_mix_[w] = num / den;
        } else {
            const std::size_t c = well.spec.perforations.front().cell;
            const double s = x.s_wf(c);
            rho_mix_[w] = (1.0 - s) * oil_density(x.p_f(c), fluid.oil).value +
                          s * water_density(x.p_f(c), fluid.water).value;
        }
    }
}

PerfRates FlowModel::perf_rate(const State& x, std::size_t w, std::size_t k) const
{
    const Well& well = in_.wells[w];
    const std::size_t c = well.spec.perforations[k].cell;
    const double g = in_.options.gravity ? 1.0 : 0.0;
    const double p_perf = perforation_pressure(x.bhp[w], well.ref_depth, well.perf_depth[k], g * rho_mix_[w]);
    return perforation_rate(PerfCellState{x.p_f(c), x.s_wf(c)}, p_perf, 1.0, well.wi[k], well.spec.kind,
                            in_.fluid, in_.frac_table);
}

std::vector<std::vector<PerfRates>> FlowModel::perforation_rates(const State& x) const
{
    std::vector<std::vector<PerfRates>> out(num_wells());
    for (std::size_t w = 0; w < num_wells(); ++w)
        for (std::size_t k = 0; k < in_.wells[w].spec.perforations.size(); ++k)
            out[w].push_back(perf_rate(x, w, k));
    return out;
}

std::vector<WellRates> FlowModel::well_rates(const State& x) const
{
    const auto rates = perforation_rates(x);
    std::vector<WellRates> out(num_wells());
    for (std::size_t w = 0; w < num_wells(); ++w) {
        WellRates& r = out[w];
        double rb_water = 0.0;
        for (const auto& pr : rates[w]) {
            r.mass[Oil] += pr.mass[Oil];
            r.mass[Water] += pr.mass[Water];
            rb_water += pr.reservoir_rate[Water];
        }
        r.oil = -surface_rate(r.mass[Oil], in_.fluid.oil);
        r.water = -surface_rate(r.mass[Water], in_.fluid.water);
        if (in_.wells[w].spec.kind == WellKind::Injector) {
            r.water_injected = surface_rate(r.mass[Water], in_.fluid.water);
            r.water_injected_rb = rb_water;
        }
    }
    return out;
}

void FlowModel::assemble_wells(const State& now, std::span<const WellControlState> controls, LinearSystem& out,
                               const std::vector<std::vector<PerfRates>>& rates) const
{
    const std::size_t nc = num_cells();
    const auto bs = static_cast<std::size_t>(block_size());
    auto& a = out.jacobian;
    for (std::size_t w = 0; w < num_wells(); ++w) {
        const Well& well = in_.wells[w];
        const auto& ctl = controls[w];
        const auto eq = well_equation(well, ctl.control, now.bhp[w], ctl.max_rate, ctl.bhp_limit, rates[w],
                                      in_.fluid);
        // rate rows are made relative to the target so they weigh like cell rows
        const double scale =
            ctl.control == WellControl::Rate && in_.options.residual_scaling ? 1.0 / std::max(std::abs(ctl.max_rate), 1.0)
                                                                             : 1.0;
        out.residual[bs * nc + w] = scale * eq.residual;
        a.block(a.diag_pos(nc + w))[0] += scale * eq.d_pbh;
        for (std::size_t k = 0; k < rates[w].size(); ++k) {
            double* blk = a.block(perf_pos_wc_[w][k]);
            blk[0] += scale * eq.d_cell[k][0];
            blk[1] += scale * eq.d_cell[k][1];
        }
    }
    a.pad_well_diagonals();
}

PhasePair FlowModel::mass_balance_defect(const LinearSystem& sys, double dt) const
{
    const auto bs = static_cast<std::size_t>(block_size());
    PhasePair sum{0.0, 0.0};
    for (std::size_t c = 0; c < num_cells(); ++c) {
        const double inv = 1.0 / sys.row_scale[c];
        for (std::size_t k = 0; k < bs; ++k)
            sum[k % 2] += sys.residual[bs * c + k] * inv;
    }
    return {sum[0] * dt, sum[1] * dt};
}

// --- DualPorosityModel ------------------------------------------------------------

DualPorosityModel::DualPorosityModel(ModelInputs in) : FlowModel(std::move(in)) { build_pattern(4); }

void DualPorosityModel::assemble(WorkerPool& pool, const State& now, const State& old, double dt,
                                 std::span<const WellControlState> controls, LinearSystem& out) const
{
    const Grid& g = grid();
    const auto& conns = g.connections();
    const auto& fluid = in_.fluid;
    const double grav = gravity();
    auto& a = out.jacobian;
    if (!a.same_pattern(pattern_))
        out = make_system();
    a.set_zero();
    std::fill(out.residual.begin(), out.residual.end(), 0.0);

    std::vector<FluxResult> flux(conns.size());
    pool.parallel_for(conns.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const auto& cn = conns[k];
            flux[k] = fracture_flux(cn, {now.p_f(cn.cell_i), now.s_wf(cn.cell_i)},
                                    {now.p_f(cn.cell_j), now.s_wf(cn.cell_j)}, fluid, in_.frac_table, grav);
        }
    });
    const auto rates = perforation_rates(now);

    std::atomic<std::size_t> clamps{0};
    pool.parallel_for(num_cells(), [&](std::size_t b, std::size_t e) {
        std::size_t local_clamps = 0;
        for (std::size_t c = b; c < e; ++c) {
            const double vol = g.volume(c);
            double* r = out.residual.data() + 4 * c;
            double* d = a.block(a.diag_pos(c));
            const ContinuumCell f_now{now.p_f(c), now.s_wf(c)}, m_now{now.p_m(c), now.s_wm(c)};

            const auto acc_f = accumulation(vol, g.props().fracture.rock(c), f_now, {old.p_f(c), old.s_wf(c)}, dt,
                                            fluid, in_.frac_table);
            const auto acc_m = accumulation(vol, g.props().matrix.rock(c), m_now, {old.p_m(c), old.s_wm(c)}, dt,
                                            fluid, in_.matrix_table);
            local_clamps += acc_f.clamped + acc_m.clamped;
            const auto tr = transfer_term(g.sigma(c), g.transfer_perm(c), vol, f_now, m_now, fluid, in_.frac_table,
                                          in_.matrix_table);
            for (int ph = 0; ph < 2; ++ph) {
                const int rf = ph, rm = 2 + ph;
                r[rf] += acc_f.term[ph].v + tr.to_matrix[ph].v;
                r[rm] += acc_m.term[ph].v - tr.to_matrix[ph].v;
                for (int v = 0; v < 2; ++v) {
                    d[rf * 4 + v] += acc_f.term[ph].d[v];
                    d[rm * 4 + 2 + v] += acc_m.term[ph].d[v];
                }
                for (int v = 0; v < 4; ++v) {
                    d[rf * 4 + v] += tr.to_matrix[ph].d[v];
                    d[rm * 4 + v] -= tr.to_matrix[ph].d[v];
                }
            }

            for (std::size_t k : g.cell_connections(c)) {
                const auto& cn = conns[k];
                const bool is_i = cn.cell_i == c;
                // residual gets -inflow; flux[k] is the inflow into cell_i
                const double sign = is_i ? -1.0 : 1.0;
                double* off = a.block(is_i ? conn_pos_ij_[k] : conn_pos_ji_[k]);
                const int self = is_i ? 0 : 2, other = is_i ? 2 : 0;
                for (int ph = 0; ph < 2; ++ph) {
                    const auto& fl = flux[k].into_i[ph];
                    r[ph] += sign * fl.v;
                    d[ph * 4 + 0] += sign * fl.d[self];
                    d[ph * 4 + 1] += sign * fl.d[self + 1];
                    off[ph * 4 + 0] += sign * fl.d[other];
                    off[ph * 4 + 1] += sign * fl.d[other + 1];
                }
            }

            for (const auto& [w, k] : cell_perfs_[c]) {
                const auto& pr = rates[w][k];
                double* cw = a.block(perf_pos_cw_[w][k]);
                for (int ph = 0; ph < 2; ++ph) {
                    r[ph] -= pr.mass[ph];
                    d[ph * 4 + 0] -= pr.dmass[ph][0];
                    d[ph * 4 + 1] -= pr.dmass[ph][1];
                    cw[ph * 4 + 0] -= pr.dmass[ph][2];
                }
            }

            const double scale = in_.options.residual_scaling ? dt / vol : 1.0;
            out.row_scale[c] = scale;
            if (scale != 1.0) {
                for (int i = 0; i < 4; ++i)
                    r[i] *= scale;
                const auto rp = a.row_ptr();
                for (std::size_t pos = rp[c]; pos < rp[c + 1]; ++pos) {
                    double* blk = a.block(pos);
                    for (std::size_t i = 0; i < 16; ++i)
                        blk[i] *= scale;
                }
            }
        }
        clamps += local_clamps;
    });
    out.porosity_clamps = clamps.load();

    assemble_wells(now, controls, out, rates);
}

void DualPorosityModel::apply_update(State& x, std::span<const double> y, double max_dp, double max_ds) const
{
    const std::size_t nc = num_cells();
    for (std::size_t c = 0; c < nc; ++c) {
        x.p_f(c) += clamp_abs(y[4 * c], max_dp);
        x.s_wf(c) = std::clamp(x.s_wf(c) + clamp_abs(y[4 * c + 1], max_ds), 0.0, 1.0);
        x.p_m(c) += clamp_abs(y[4 * c + 2], max_dp);
        x.s_wm(c) = std::clamp(x.s_wm(c) + clamp_abs(y[4 * c + 3], max_ds), 0.0, 1.0);
    }
    for (std::size_t w = 0; w < num_wells(); ++w)
        x.bhp[w] += clamp_abs(y[4 * nc + w], max_dp);
}

namespace {

PhasePair continuum_mass(double volume, const RockCompressibility& rock, double p, double s_w,
                         const FluidProps& fluid, const SatFuncTable& table)
{
    const double phi = porosity(p, rock).value;
    const double pc = table.evaluate(s_w).p_cow;
    return {volume * phi * (1.0 - s_w) * oil_density(p, fluid.oil).value,
            volume * phi * s_w * water_density(p - pc, fluid.water).value};
}

}  // namespace

PhasePair DualPorosityModel::mass_in_place(const State& x) const
{
    const Grid& g = grid();
    PhasePair m{0.0, 0.0};
    for (std::size_t c = 0; c < num_cells(); ++c) {
        const auto f = continuum_mass(g.volume(c), g.props().fracture.rock(c), x.p_f(c), x.s_wf(c), in_.fluid,
                                      in_.frac_table);
        const auto mm = continuum_mass(g.volume(c), g.props().matrix.rock(c), x.p_m(c), x.s_wm(c), in_.fluid,
                                       in_.matrix_table);
        m[0] += f[0] + mm[0];
        m[1] += f[1] + mm[1];
    }
    return m;
}

// --- SinglePorosityModel ------------------------------------------------------

SinglePorosityModel::SinglePorosityModel(ModelInputs in) : FlowModel(std::move(in)) { build_pattern(2); }

void SinglePorosityModel::assemble(WorkerPool& pool, const State& now, const State& old, double dt,
                                   std::span<const WellControlState> controls, LinearSystem& out) const
{
    const Grid& g = grid();
    const auto& conns = g.connections();
    const auto& fluid = in_.fluid;
    const double grav = gravity();
    auto& a = out.jacobian;
    if (!a.same_pattern(pattern_))
        out = make_system();
    a.set_zero();
    std::fill(out.residual.begin(), out.residual.end(), 0.0);

    std::vector<FluxResult> flux(conns.size());
    pool.parallel_for(conns.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const auto& cn = conns[k];
            flux[k] = fracture_flux(cn, {now.p_f(cn.cell_i), now.s_wf(cn.cell_i)},
                                    {now.p_f(cn.cell_j), now.s_wf(cn.cell_j)}, fluid, in_.frac_table, grav);
        }
    });
    const auto rates = perforation_rates(now);

    std::atomic<std::size_t> clamps{0};
    pool.parallel_for(num_cells(), [&](std::size_t b, std::size_t e) {
        std::size_t local_clamps = 0;
        for (std::size_t c = b; c < e; ++c) {
            const double vol = g.volume(c);
            double* r = out.residual.data() + 2 * c;
            double* d = a.block(a.diag_pos(c));
            const auto acc = accumulation(vol, g.props().fracture.rock(c), {now.p_f(c), now.s_wf(c)},
                                          {old.p_f(c), old.s_wf(c)}, dt, fluid, in_.frac_table);
            local_clamps += acc.clamped;
            for (int ph = 0; ph < 2; ++ph) {
                r[ph] += acc.term[ph].v;
                d[ph * 2 + 0] += acc.term[ph].d[0];
                d[ph * 2 + 1] += acc.term[ph].d[1];
            }
            for (std::size_t k : g.cell_connections(c)) {
                const auto& cn = conns[k];
                const bool is_i = cn.cell_i == c;
                const double sign = is_i ? -1.0 : 1.0;
                double* off = a.block(is_i ? conn_pos_ij_[k] : conn_pos_ji_[k]);
                const int self = is_i ? 0 : 2, other = is_i ? 2 : 0;
                for (int ph = 0; ph < 2; ++ph) {
                    const auto& fl = flux[k].into_i[ph];
                    r[ph] += sign * fl.v;
                    d[ph * 2 + 0] += sign * fl.d[self];
                    d[ph * 2 + 1] += sign * fl.d[self + 1];
                    off[ph * 2 + 0] += sign * fl.d[other];
                    off[ph * 2 + 1] += sign * fl.d[other + 1];
                }
            }
            for (const auto& [w, k] : cell_perfs_[c]) {
                const auto& pr = rates[w][k];
                double* cw = a.block(perf_pos_cw_[w][k]);
                for (int ph = 0; ph < 2; ++ph) {
                    r[ph] -= pr.mass[ph];
                    d[ph * 2 + 0] -= pr.dmass[ph][0];
                    d[ph * 2 + 1] -= pr.dmass[ph][1];
                    cw[ph * 2 + 0] -= pr.dmass[ph][2];
                }
            }
            const double scale = in_.options.residual_scaling ? dt / vol : 1.0;
            out.row_scale[c] = scale;
            if (scale != 1.0) {
                r[0] *= scale;
                r[1] *= scale;
                const auto rp = a.row_ptr();
                for (std::size_t pos = rp[c]; pos < rp[c + 1]; ++pos) {
                    double* blk = a.block(pos);
                    for (std::size_t i = 0; i < 4; ++i)
                        blk[i] *= scale;
                }
            }
        }
        clamps += local_clamps;
    });
    out.porosity_clamps = clamps.load();

    assemble_wells(now, controls, out, rates);
}

void SinglePorosityModel::apply_update(State& x, std::span<const double> y, double max_dp, double max_ds) const
{
    const std::size_t nc = num_cells();
    for (std::size_t c = 0; c < nc; ++c) {
        x.p_f(c) += clamp_abs(y[2 * c], max_dp);
        x.s_wf(c) = std::clamp(x.s_wf(c) + clamp_abs(y[2 * c + 1], max_ds), 0.0, 1.0);
    }
    for (std::size_t w = 0; w < num_wells(); ++w)
        x.bhp[w] += clamp_abs(y[2 * nc + w], max_dp);
}

PhasePair SinglePorosityModel::mass_in_place(const State& x) const
{
    const Grid& g = grid();
    PhasePair m{0.0, 0.0};
    for (std::size_t c = 0; c < num_cells(); ++c) {
        const auto f = continuum_mass(g.volume(c), g.props().fracture.rock(c), x.p_f(c), x.s_wf(c), in_.fluid,
                                      in_.frac_table);
        m[0] += f[0];
        m[1] += f[1];
    }
    return m;
}

}  // namespace dpsim
