#include "dpsim/props.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dpsim {

void PhasePvt::validate(const std::string& what) const
{
    if (!(b_ref > 0.0) || !(compressibility >= 0.0) || !(viscosity > 0.0) || !(rho_sc > 0.0))
        throw std::invalid_argument(what + ": PVT requires B_ref > 0, c >= 0, mu > 0, rho_sc > 0");
}

ValueDeriv formation_volume_factor(double p, const PhasePvt& pvt)
{
    const double dp = p - pvt.p_ref;
    if (pvt.form == FvfForm::Linear) {
        const double b = pvt.b_ref * (1.0 - pvt.compressibility * dp);
        return {b, -pvt.b_ref * pvt.compressibility};
    }
    const double b = pvt.b_ref * std::exp(-pvt.compressibility * dp);
    return {b, -pvt.compressibility * b};
}

ValueDeriv phase_density(double p, const PhasePvt& pvt)
{
    const auto b = formation_volume_factor(p, pvt);
    const double rho = pvt.rho_sc / b.value;
    return {rho, -rho * b.deriv / b.value};
}

void RockCompressibility::validate(const std::string& what) const
{
    if (!(phi_ref > 0.0 && phi_ref < 1.0) || !(c_r >= 0.0))
        throw std::invalid_argument(what + ": rock requires 0 < phi_ref < 1 and c_r >= 0");
}

PorosityValue porosity(double p, const RockCompressibility& rock)
{
    constexpr double phi_floor = 1e-12;
    const double phi = rock.phi_ref * (1.0 + rock.c_r * (p - rock.p_ref));
    if (phi < phi_floor)
        return {phi_floor, 0.0, true};
    if (phi > 1.0)
        return {1.0, 0.0, true};
    return {phi, rock.phi_ref * rock.c_r, false};
}

SatFuncTable::SatFuncTable(std::vector<SatFuncRow> rows) : rows_(std::move(rows))
{
    if (rows_.empty())
        throw std::invalid_argument("saturation table is empty");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (r.k_rw < 0.0 || r.k_rw > 1.0 || r.k_ro < 0.0 || r.k_ro > 1.0)
            throw std::invalid_argument("saturation table: relative permeability outside [0, 1]");
        if (i == 0)
            continue;
        const auto& prev = rows_[i - 1];
        if (!(r.s_w > prev.s_w))
            throw std::invalid_argument("saturation table: s_w must be strictly increasing");
        if (r.k_rw < prev.k_rw)
            throw std::invalid_argument("saturation table: k_rw must be non-decreasing");
        if (r.k_ro > prev.k_ro)
            throw std::invalid_argument("saturation table: k_ro must be non-increasing");
    }
}

SatFuncEval SatFuncTable::evaluate(double s_w) const
{
    SatFuncEval out;
    const auto& first = rows_.front();
    const auto& last = rows_.back();
    if (s_w <= first.s_w || rows_.size() == 1) {
        out.k_rw = first.k_rw;
        out.k_ro = first.k_ro;
        out.p_cow = first.p_cow;
        return out;
    }
    if (s_w > last.s_w) {
        out.k_rw = last.k_rw;
        out.k_ro = last.k_ro;
        out.p_cow = last.p_cow;
        return out;
    }
    // first row with s >= s_w; the segment is [hi-1, hi]
    const auto it = std::lower_bound(rows_.begin(), rows_.end(), s_w,
                                     [](const SatFuncRow& r, double s) { return r.s_w < s; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double ds = hi.s_w - lo.s_w;
    const double t = (s_w - lo.s_w) / ds;
    out.dk_rw = (hi.k_rw - lo.k_rw) / ds;
    out.dk_ro = (hi.k_ro - lo.k_ro) / ds;
    out.dp_cow = (hi.p_cow - lo.p_cow) / ds;
    if (s_w == hi.s_w) {
        out.k_rw = hi.k_rw;
        out.k_ro = hi.k_ro;
        out.p_cow = hi.p_cow;
    } else {
        out.k_rw = lo.k_rw + t * (hi.k_rw - lo.k_rw);
        out.k_ro = lo.k_ro + t * (hi.k_ro - lo.k_ro);
        out.p_cow = lo.p_cow + t * (hi.p_cow - lo.p_cow);
    }
    return out;
}

SatFuncTable corey_table(const CoreyParams& c)
{
    if (c.swc < 0.0 || c.sor < 0.0 || c.swc + c.sor >= 1.0)
        throw std::invalid_argument("Corey table: need swc, sor >= 0 and swc + sor < 1");
    if (c.points < 2)
        throw std::invalid_argument("Corey table: need at least 2 points");
    if (c.krw_max < 0.0 || c.krw_max > 1.0 || c.kro_max < 0.0 || c.kro_max > 1.0)
        throw std::invalid_argument("Corey table: endpoints must lie in [0, 1]");
    std::vector<SatFuncRow> rows;
    rows.reserve(static_cast<std::size_t>(c.points));
    const double span = 1.0 - c.swc - c.sor;
    for (int i = 0; i < c.points; ++i) {
        const double se = static_cast<double>(i) / (c.points - 1);
        rows.push_back({c.swc + se * span, c.krw_max * std::pow(se, c.n_w),
                        c.kro_max * std::pow(1.0 - se, c.n_o), c.pc_max * (1.0 - se)});
    }
    return SatFuncTable(std::move(rows));
}

}  // namespace dpsim
