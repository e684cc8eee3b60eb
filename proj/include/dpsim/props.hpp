#ifndef DPSIM_PROPS_HPP
#define DPSIM_PROPS_HPP

#include <string>
#include <vector>

namespace dpsim {

/// Field-unit constants (psi, ft, mD, cp, lbm/ft3, bbl/day).
struct UnitConstants {
    /// mD*ft*psi/cp -> bbl/day
    static constexpr double darcy = 0.001127;
    /// lbm/ft3 -> psi/ft
    static constexpr double gravity = 1.0 / 144.0;
    static constexpr double ft3_per_bbl = 5.614583;
};

/// A property value together with its derivative w.r.t. the single argument.
struct ValueDeriv {
    double value = 0.0;
    double deriv = 0.0;
};

enum class FvfForm { Exponential, Linear };

/// Constant-compressibility phase PVT. Used for both oil and water.
struct PhasePvt {
    double p_ref = 14.7;          // psi
    double b_ref = 1.0;           // RB/STB at p_ref
    double compressibility = 0.0; // 1/psi
    double viscosity = 1.0;       // cp
    double rho_sc = 62.4;         // lbm/ft3
    FvfForm form = FvfForm::Exponential;

    void validate(const std::string& what) const;
};

using PvtOil = PhasePvt;
using PvtWater = PhasePvt;

/// Formation volume factor B(p).
ValueDeriv formation_volume_factor(double p, const PhasePvt& pvt);

/// rho_sc / B(p). The exponential form gives d(rho)/dp = rho * c.
ValueDeriv phase_density(double p, const PhasePvt& pvt);

inline ValueDeriv oil_density(double p, const PvtOil& pvt) { return phase_density(p, pvt); }
inline ValueDeriv water_density(double p, const PvtWater& pvt) { return phase_density(p, pvt); }

struct RockCompressibility {
    double phi_ref = 0.2;  // fraction
    double c_r = 0.0;      // 1/psi
    double p_ref = 14.7;   // psi

    void validate(const std::string& what) const;
};

struct PorosityValue {
    double value = 0.0;
    double deriv = 0.0;
    bool clamped = false;
};

/// phi_ref*(1 + c_r*(p - p_ref)), clamped to (0, 1]. A clamped value has zero
/// derivative and sets `clamped` so callers can count it.
PorosityValue porosity(double p, const RockCompressibility& rock);

struct SatFuncRow {
    double s_w;
    double k_rw;
    double k_ro;
    double p_cow;
};

struct SatFuncEval {
    double k_rw = 0.0, k_ro = 0.0, p_cow = 0.0;
    double dk_rw = 0.0, dk_ro = 0.0, dp_cow = 0.0;
};

/// Piecewise-linear water/oil saturation functions.
///
/// Outside [s_first, s_last] values clamp to the end rows with zero slope.
/// At an interior node the slope of the segment to its left is returned; at
/// the first node the slope is zero (the clamp region is its left segment).
class SatFuncTable {
public:
    SatFuncTable() = default;
    explicit SatFuncTable(std::vector<SatFuncRow> rows);

    SatFuncEval evaluate(double s_w) const;

    const std::vector<SatFuncRow>& rows() const { return rows_; }
    double s_min() const { return rows_.front().s_w; }
    double s_max() const { return rows_.back().s_w; }
    /// k_rw at the last row; used as injected-water relative permeability.
    double krw_endpoint() const { return rows_.back().k_rw; }
    bool empty() const { return rows_.empty(); }

private:
    std::vector<SatFuncRow> rows_;
};

inline SatFuncEval eval_satfunc(double s_w, const SatFuncTable& tab) { return tab.evaluate(s_w); }

/// Parameters of a Corey-type curve set sampled into a table.
struct CoreyParams {
    double swc = 0.0;
    double sor = 0.0;
    double n_w = 2.0;
    double n_o = 2.0;
    double krw_max = 1.0;
    double kro_max = 1.0;
    double pc_max = 0.0;  // p_cow at s_w = swc, falling linearly to 0 at 1 - sor
    int points = 21;
};

SatFuncTable corey_table(const CoreyParams& params);

struct FluidProps {
    PvtOil oil;
    PvtWater water;
};

}  // namespace dpsim

#endif
