#ifndef DPSIM_ASSEMBLY_HPP
#define DPSIM_ASSEMBLY_HPP

#include "dpsim/ad.hpp"
#include "dpsim/block_matrix.hpp"
#include "dpsim/grid.hpp"
#include "dpsim/props.hpp"
#include "dpsim/wells.hpp"

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace dpsim {

class WorkerPool;

/// Unknowns at one time level. Per cell: fracture oil pressure, fracture water
/// saturation, matrix oil pressure, matrix water saturation (psi, fraction).
/// Oil saturation is always 1 - s_w and is never stored.
struct State {
    static constexpr int kVars = 4;
    std::vector<double> cells;  // interleaved (p_f, s_wf, p_m, s_wm)
    std::vector<double> bhp;    // psi, one per well

    State() = default;
    State(std::size_t n_cells, std::size_t n_wells) : cells(kVars * n_cells, 0.0), bhp(n_wells, 0.0) {}

    std::size_t num_cells() const { return cells.size() / kVars; }
    double& p_f(std::size_t c) { return cells[kVars * c]; }
    double& s_wf(std::size_t c) { return cells[kVars * c + 1]; }
    double& p_m(std::size_t c) { return cells[kVars * c + 2]; }
    double& s_wm(std::size_t c) { return cells[kVars * c + 3]; }
    double p_f(std::size_t c) const { return cells[kVars * c]; }
    double s_wf(std::size_t c) const { return cells[kVars * c + 1]; }
    double p_m(std::size_t c) const { return cells[kVars * c + 2]; }
    double s_wm(std::size_t c) const { return cells[kVars * c + 3]; }
};

/// Run-time limits of one well (schedule-dependent) and its active control.
struct WellControlState {
    WellControl control = WellControl::Rate;
    double max_rate = 0.0;
    double bhp_limit = 0.0;
};

struct AssemblyOptions {
    bool residual_scaling = true;  // divide cell rows by V/dt
    bool gravity = true;
};

/// Jacobian and residual of F(x) = 0. The right-hand side of the Newton
/// system is -residual.
struct LinearSystem {
    BlockMatrix jacobian;
    std::vector<double> residual;  // compact layout
    std::vector<double> row_scale; // factor applied to each cell's rows (dt/V or 1)
    std::size_t porosity_clamps = 0;
};

/// Per-phase pair, index with Phase::Oil / Phase::Water.
using PhasePair = std::array<double, 2>;

// --- residual kernels -------------------------------------------------------

/// Oil/water phase quantities of one continuum at (p, s_w).
template <int N>
struct PhaseEval {
    std::array<Ad<N>, 2> pressure;  // phase pressures (water: p - p_cow)
    std::array<Ad<N>, 2> density;
    std::array<Ad<N>, 2> mobility;  // k_r * rho / mu
};

template <int N>
PhaseEval<N> eval_phases(const Ad<N>& p, const Ad<N>& s_w, const SatFuncTable& table, const FluidProps& fluid)
{
    const auto sf = table.evaluate(s_w.v);
    PhaseEval<N> e;
    const Ad<N> pc = chain(ValueDeriv{sf.p_cow, sf.dp_cow}, s_w);
    e.pressure[Oil] = p;
    e.pressure[Water] = p - pc;
    e.density[Oil] = chain(oil_density(e.pressure[Oil].v, fluid.oil), e.pressure[Oil]);
    e.density[Water] = chain(water_density(e.pressure[Water].v, fluid.water), e.pressure[Water]);
    e.mobility[Oil] = (1.0 / fluid.oil.viscosity) * (chain(ValueDeriv{sf.k_ro, sf.dk_ro}, s_w) * e.density[Oil]);
    e.mobility[Water] =
        (1.0 / fluid.water.viscosity) * (chain(ValueDeriv{sf.k_rw, sf.dk_rw}, s_w) * e.density[Water]);
    return e;
}

struct ContinuumCell {
    double p = 0.0;
    double s_w = 0.0;
};

/// V*[(phi*s*rho)^{n+1} - (phi*s*rho)^n]/dt per phase (lbm/day); derivative
/// slots (p, s_w) of the new state.
struct AccumulationResult {
    std::array<Ad<2>, 2> term;
    bool clamped = false;
};
AccumulationResult accumulation(double volume, const RockCompressibility& rock, const ContinuumCell& now,
                                const ContinuumCell& old, double dt, const FluidProps& fluid,
                                const SatFuncTable& table);

/// Upstream-weighted fracture flux per phase into cell_i (lbm/day); cell_j
/// receives the negative. Derivative slots (p_i, s_i, p_j, s_j).
struct FluxResult {
    std::array<Ad<4>, 2> into_i;
};
FluxResult fracture_flux(const Connection& conn, const ContinuumCell& ci, const ContinuumCell& cj,
                         const FluidProps& fluid, const SatFuncTable& table, double gravity);

/// Matrix-fracture transfer per phase, positive from fracture to matrix
/// (lbm/day). Derivative slots (p_f, s_wf, p_m, s_wm).
struct TransferResult {
    std::array<Ad<4>, 2> to_matrix;
};
TransferResult transfer_term(double sigma, double k_m, double volume, const ContinuumCell& frac,
                             const ContinuumCell& matrix, const FluidProps& fluid, const SatFuncTable& frac_table,
                             const SatFuncTable& matrix_table);

// --- models -----------------------------------------------------------------

struct ModelInputs {
    const Grid* grid = nullptr;
    FluidProps fluid;
    SatFuncTable frac_table;
    SatFuncTable matrix_table;
    std::vector<Well> wells;
    AssemblyOptions options;
};

/// Surface rates of one well at a state.
struct WellRates {
    double oil = 0.0;           // STB/day, production positive
    double water = 0.0;         // STB/day, production positive (injection negative)
    double water_injected = 0.0;     // STB/day
    double water_injected_rb = 0.0;  // reservoir bbl/day
    PhasePair mass{};           // lbm/day into the reservoir, per phase
};

/// Discretized flow model: owns the Jacobian pattern and assembles F(x).
class FlowModel {
public:
    explicit FlowModel(ModelInputs in);
    virtual ~FlowModel() = default;

    /// Unknowns per cell in the linear system (4 dual, 2 single).
    virtual int block_size() const = 0;
    /// Which local unknowns are pressures (CPR pressure set).
    virtual std::vector<int> pressure_indices() const = 0;

    /// Residual and Jacobian at `now`, backward Euler from `old`.
    virtual void assemble(WorkerPool& pool, const State& now, const State& old, double dt,
                          std::span<const WellControlState> controls, LinearSystem& out) const = 0;

    /// Maps the compact solution y of the Newton system onto `x`, limiting
    /// each pressure change to max_dp and each saturation change to max_ds,
    /// then clamping saturations to [0, 1].
    virtual void apply_update(State& x, std::span<const double> y, double max_dp, double max_ds) const = 0;

    /// Fluid mass in place per phase (lbm).
    virtual PhasePair mass_in_place(const State& x) const = 0;

    /// Sum of the unscaled residual rows per phase, times dt (lbm): the
    /// material-balance defect of the step.
    PhasePair mass_balance_defect(const LinearSystem& sys, double dt) const;

    /// Fresh linear system with the model's sparsity pattern.
    LinearSystem make_system() const;

    /// Refreshes the lagged wellbore mixture densities from `x`.
    void update_well_densities(const State& x);
    const std::vector<double>& well_densities() const { return rho_mix_; }

    /// Perforation rates of every well at `x`.
    std::vector<std::vector<PerfRates>> perforation_rates(const State& x) const;
    std::vector<WellRates> well_rates(const State& x) const;

    const Grid& grid() const { return *in_.grid; }
    const FluidProps& fluid() const { return in_.fluid; }
    const std::vector<Well>& wells() const { return in_.wells; }
    const SatFuncTable& frac_table() const { return in_.frac_table; }
    const SatFuncTable& matrix_table() const { return in_.matrix_table; }
    const AssemblyOptions& options() const { return in_.options; }
    std::size_t num_cells() const { return in_.grid->num_cells(); }
    std::size_t num_wells() const { return in_.wells.size(); }
    std::size_t num_unknowns() const { return static_cast<std::size_t>(block_size()) * num_cells() + num_wells(); }

protected:
    void build_pattern(int bs);
    double gravity() const { return in_.options.gravity ? UnitConstants::gravity : 0.0; }

    /// Perforation rate with the lagged mixture density.
    PerfRates perf_rate(const State& x, std::size_t well, std::size_t perf) const;

    /// Well rows and the well contributions to cell rows (unscaled).
    void assemble_wells(const State& now, std::span<const WellControlState> controls, LinearSystem& out,
                        const std::vector<std::vector<PerfRates>>& rates) const;

    ModelInputs in_;
    std::vector<double> rho_mix_;
    BlockMatrix pattern_;
    std::vector<std::size_t> conn_pos_ij_, conn_pos_ji_;  // per connection
    // per well, per perforation: (cell row, well col) and (well row, cell col)
    std::vector<std::vector<std::size_t>> perf_pos_cw_, perf_pos_wc_;
    // per cell: (well, perforation) pairs
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> cell_perfs_;
};

/// Two-porosity model: fracture and matrix continua per cell, flow between
/// fracture cells only, matrix-fracture transfer, wells in the fracture.
class DualPorosityModel final : public FlowModel {
public:
    explicit DualPorosityModel(ModelInputs in);

    int block_size() const override { return 4; }
    std::vector<int> pressure_indices() const override { return {0, 2}; }
    void assemble(WorkerPool& pool, const State& now, const State& old, double dt,
                  std::span<const WellControlState> controls, LinearSystem& out) const override;
    void apply_update(State& x, std::span<const double> y, double max_dp, double max_ds) const override;
    PhasePair mass_in_place(const State& x) const override;
};

/// Fracture continuum alone: a single-porosity two-phase model. Matrix
/// entries of the state are carried unchanged.
class SinglePorosityModel final : public FlowModel {
public:
    explicit SinglePorosityModel(ModelInputs in);

    int block_size() const override { return 2; }
    std::vector<int> pressure_indices() const override { return {0}; }
    void assemble(WorkerPool& pool, const State& now, const State& old, double dt,
                  std::span<const WellControlState> controls, LinearSystem& out) const override;
    void apply_update(State& x, std::span<const double> y, double max_dp, double max_ds) const override;
    PhasePair mass_in_place(const State& x) const override;
};

}  // namespace dpsim

#endif
