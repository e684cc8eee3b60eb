#ifndef DPSIM_WELLS_HPP
#define DPSIM_WELLS_HPP

#include "dpsim/grid.hpp"
#include "dpsim/props.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace dpsim {

enum class WellKind { Injector, Producer };
enum class WellControl { Rate, Bhp };
enum class RadiusModel { Circle, Peaceman };

/// Geometry inputs for a computed well index.
struct PerfGeometry {
    std::optional<double> k_h;  // mD*ft; empty -> k*dz of the perforated fracture cell
    double r_w = 0.25;          // ft
    double skin = 0.0;
    double w_frac = 1.0;
    double w_g = 1.0;
    RadiusModel radius_model = RadiusModel::Peaceman;
    Axis direction = Axis::Z;
};

struct Perforation {
    std::size_t cell = 0;
    std::optional<double> well_index;  // mD*ft; overrides the geometry when set
    PerfGeometry geometry;
};

struct WellSpec {
    std::string name;
    WellKind kind = WellKind::Producer;
    std::vector<Perforation> perforations;
    double max_rate = 0.0;   // STB/day: water for injectors, oil for producers
    double bhp_limit = 0.0;  // psi: maximum for injectors, minimum for producers
    std::optional<double> ref_depth;  // ft; empty -> depth of the first perforation
    WellControl initial_control = WellControl::Rate;
};

/// Well with resolved perforation indices and depths.
struct Well {
    WellSpec spec;
    std::vector<double> wi;          // mD*ft per perforation
    std::vector<double> perf_depth;  // ft per perforation
    double ref_depth = 0.0;
};

struct WellState {
    double p_bh = 0.0;
    WellControl control = WellControl::Rate;
    std::vector<std::array<double, 2>> perf_rates;  // STB/day per perforation, (oil, water), into the cell
};

/// r_e = w_g*sqrt(A_r/(pi*w_frac)).
double effective_radius_circle(double w_g, double area, double w_frac);

/// Peaceman equivalent radius for a well along `direction`, using the block
/// sizes and permeabilities of the two axes perpendicular to it.
double effective_radius_peaceman(const std::array<double, 3>& sizes, const std::array<double, 3>& perms,
                                 Axis direction);

/// W_i = 2*pi*k_h*w_frac/(ln(r_e/r_w) + skin).
double well_index(double k_h, double w_frac, double r_e, double r_w, double skin);

/// Resolves perforation well indices against the grid and validates each WellSpec.
Well make_well(const WellSpec& spec, const Grid& grid);

/// Hydrostatic correction of the bottom-hole pressure to a perforation.
double perforation_pressure(double p_bh, double ref_depth, double perf_depth, double rho_mix);

enum Phase : int { Oil = 0, Water = 1 };

/// Cell quantities seen by a perforation (fracture continuum).
struct PerfCellState {
    double p = 0.0;    // oil-phase pressure
    double s_w = 0.0;
};

/// Rates at one perforation. Mass rates are in lbm/day into the cell and carry
/// derivatives w.r.t. (p, s_w, p_bh) of the perforated cell and well.
struct PerfRates {
    std::array<double, 2> mass{};
    std::array<std::array<double, 3>, 2> dmass{};
    std::array<double, 2> reservoir_rate{};  // bbl/day at reservoir conditions
};

/// Sink/source rate at a perforation. When p_perf >= p for an injector the
/// injected water uses the end-point water relative permeability of `table`;
/// otherwise the cell's own mobilities are used.
PerfRates perforation_rate(const PerfCellState& cell, double p_perf, double dp_perf_dpbh, double wi,
                           WellKind kind, const FluidProps& fluid, const SatFuncTable& table);

/// Surface volume rate (STB/day) equivalent to a mass rate of `phase`.
double surface_rate(double mass_rate, const PhasePvt& pvt);

/// Well equation residual and its derivatives.
struct WellEquation {
    double residual = 0.0;
    double d_pbh = 0.0;
    // d residual / d(p, s_w) per perforation
    std::vector<std::array<double, 2>> d_cell;
};

/// Rate mode: governed-phase surface rate minus target (water injected for
/// injectors, oil produced for producers). BHP mode: p_bh - bhp_limit.
WellEquation well_equation(const Well& well, WellControl control, double p_bh, double target_rate,
                           double bhp_limit, const std::vector<PerfRates>& perfs, const FluidProps& fluid);

}  // namespace dpsim

#endif
