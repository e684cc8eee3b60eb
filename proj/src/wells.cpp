#include "dpsim/wells.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dpsim {

double effective_radius_circle(double w_g, double area, double w_frac)
{
    return w_g * std::sqrt(area / (std::numbers::pi * w_frac));
}

double effective_radius_peaceman(const std::array<double, 3>& sizes, const std::array<double, 3>& perms,
                                 Axis direction)
{
    // (a, b) are the two axes perpendicular to the well.
    int a = 0, b = 1;
    switch (direction) {
    case Axis::Z: a = 0; b = 1; break;
    case Axis::Y: a = 0; b = 2; break;
    case Axis::X: a = 1; b = 2; break;
    }
    const double ka = perms[a], kb = perms[b];
    if (!(ka > 0.0) || !(kb > 0.0))
        throw std::invalid_argument("anisotropy ratio undefined");
    const double ratio = kb / ka;
    const double num = std::sqrt(sizes[a] * sizes[a] * std::sqrt(ratio) + sizes[b] * sizes[b] / std::sqrt(ratio));
    const double den = std::pow(ratio, 0.25) + std::pow(1.0 / ratio, 0.25);
    return 0.28 * num / den;
}

double well_index(double k_h, double w_frac, double r_e, double r_w, double skin)
{
    const double denom = std::log(r_e / r_w) + skin;
    if (!(r_w > 0.0) || !(r_e > 0.0) || !(denom > 0.0))
        throw std::invalid_argument("non-physical well geometry");
    return 2.0 * std::numbers::pi * k_h * w_frac / denom;
}

Well make_well(const WellSpec& spec, const Grid& grid)
{
    if (spec.perforations.empty())
        throw std::invalid_argument("well " + spec.name + ": at least one perforation required");
    if (spec.max_rate < 0.0)
        throw std::invalid_argument("well " + spec.name + ": rate limit must be >= 0");
    Well well;
    well.spec = spec;
    const auto& frac = grid.props().fracture;
    for (const auto& perf : spec.perforations) {
        if (perf.cell >= grid.num_cells())
            throw std::invalid_argument("well " + spec.name + ": perforation outside grid");
        well.perf_depth.push_back(grid.depth(perf.cell));
        if (perf.well_index) {
            if (*perf.well_index < 0.0)
                throw std::invalid_argument("well " + spec.name + ": negative well index");
            well.wi.push_back(*perf.well_index);
            continue;
        }
        const auto& g = perf.geometry;
        if (!(g.r_w > 0.0) || !(g.w_frac > 0.0 && g.w_frac <= 1.0))
            throw std::invalid_argument("well " + spec.name + ": need r_w > 0 and 0 < w_frac <= 1");
        const std::size_t c = perf.cell;
        const std::array<double, 3> sizes{grid.dx(c), grid.dy(c), grid.dz(c)};
        const std::array<double, 3> perms{frac.perm_x[c], frac.perm_y[c], frac.perm_z[c]};
        const int axis = static_cast<int>(g.direction);
        // k*h across the perforated length: perpendicular perms, axis length
        double k_h = 0.0;
        if (g.k_h) {
            k_h = *g.k_h;
        } else {
            const int a = axis == 0 ? 1 : 0;
            const int b = axis == 2 ? 1 : 2;
            k_h = std::sqrt(perms[a] * perms[b]) * sizes[axis];
        }
        double r_e = 0.0;
        if (g.radius_model == RadiusModel::Peaceman) {
            r_e = effective_radius_peaceman(sizes, perms, g.direction);
        } else {
            const int a = axis == 0 ? 1 : 0;
            const int b = axis == 2 ? 1 : 2;
            r_e = effective_radius_circle(g.w_g, sizes[a] * sizes[b], g.w_frac);
        }
        well.wi.push_back(well_index(k_h, g.w_frac, r_e, g.r_w, g.skin));
    }
    well.ref_depth = spec.ref_depth.value_or(well.perf_depth.front());
    return well;
}

double perforation_pressure(double p_bh, double ref_depth, double perf_depth, double rho_mix)
{
    return p_bh + rho_mix * UnitConstants::gravity * (perf_depth - ref_depth);
}

PerfRates perforation_rate(const PerfCellState& cell, double p_perf, double dp_perf_dpbh, double wi,
                           WellKind kind, const FluidProps& fluid, const SatFuncTable& table)
{
    constexpr double conv = UnitConstants::ft3_per_bbl;
    const double coef = UnitConstants::darcy * wi;
    const double drawdown = p_perf - cell.p;
    PerfRates out;

    if (kind == WellKind::Injector && drawdown >= 0.0) {
        const auto rho = water_density(cell.p, fluid.water);
        const double kr = table.krw_endpoint();
        const double mu = fluid.water.viscosity;
        out.reservoir_rate[Water] = coef * kr / mu * drawdown;
        out.mass[Water] = conv * coef * kr * rho.value / mu * drawdown;
        out.dmass[Water] = {conv * coef * kr / mu * (rho.deriv * drawdown - rho.value), 0.0,
                            conv * coef * kr * rho.value / mu * dp_perf_dpbh};
        return out;
    }

    const auto sf = table.evaluate(cell.s_w);
    // oil
    {
        const auto rho = oil_density(cell.p, fluid.oil);
        const double mu = fluid.oil.viscosity;
        const double mob = sf.k_ro * rho.value / mu;
        const double dmob_dp = sf.k_ro * rho.deriv / mu;
        const double dmob_ds = sf.dk_ro * rho.value / mu;
        out.reservoir_rate[Oil] = coef * sf.k_ro / mu * drawdown;
        out.mass[Oil] = conv * coef * mob * drawdown;
        out.dmass[Oil] = {conv * coef * (dmob_dp * drawdown - mob), conv * coef * dmob_ds * drawdown,
                          conv * coef * mob * dp_perf_dpbh};
    }
    // water, density at the water-phase pressure
    {
        const auto rho = water_density(cell.p - sf.p_cow, fluid.water);
        const double mu = fluid.water.viscosity;
        const double mob = sf.k_rw * rho.value / mu;
        const double dmob_dp = sf.k_rw * rho.deriv / mu;
        const double dmob_ds = (sf.dk_rw * rho.value - sf.k_rw * rho.deriv * sf.dp_cow) / mu;
        out.reservoir_rate[Water] = coef * sf.k_rw / mu * drawdown;
        out.mass[Water] = conv * coef * mob * drawdown;
        out.dmass[Water] = {conv * coef * (dmob_dp * drawdown - mob), conv * coef * dmob_ds * drawdown,
                            conv * coef * mob * dp_perf_dpbh};
    }
    return out;
}

double surface_rate(double mass_rate, const PhasePvt& pvt)
{
    return mass_rate / (pvt.rho_sc * UnitConstants::ft3_per_bbl);
}

WellEquation well_equation(const Well& well, WellControl control, double p_bh, double target_rate,
                           double bhp_limit, const std::vector<PerfRates>& perfs, const FluidProps& fluid)
{
    WellEquation eq;
    eq.d_cell.assign(perfs.size(), {0.0, 0.0});
    if (control == WellControl::Bhp) {
        eq.residual = p_bh - bhp_limit;
        eq.d_pbh = 1.0;
        return eq;
    }
    // Producers report production as a positive rate.
    const bool injector = well.spec.kind == WellKind::Injector;
    const Phase phase = injector ? Water : Oil;
    const PhasePvt& pvt = injector ? fluid.water : fluid.oil;
    const double sign = injector ? 1.0 : -1.0;
    double rate = 0.0;
    for (std::size_t k = 0; k < perfs.size(); ++k) {
        rate += sign * surface_rate(perfs[k].mass[phase], pvt);
        eq.d_cell[k] = {sign * surface_rate(perfs[k].dmass[phase][0], pvt),
                        sign * surface_rate(perfs[k].dmass[phase][1], pvt)};
        eq.d_pbh += sign * surface_rate(perfs[k].dmass[phase][2], pvt);
    }
    eq.residual = rate - target_rate;
    return eq;
}

}  // namespace dpsim
