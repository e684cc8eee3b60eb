#include "dpsim/timestep.hpp"

#include <algorithm>
#include <stdexcept>

namespace dpsim {

void TimestepControls::validate() const
{
    if (!(dt_min > 0.0) || !(dt_min <= dt_max) || !(dt_init >= dt_min && dt_init <= dt_max))
        throw std::invalid_argument("time step limits need 0 < dt_min <= dt_init <= dt_max");
    if (!(grow >= 1.0) || !(cut > 0.0 && cut < 1.0) || max_cuts < 0)
        throw std::invalid_argument("time step factors need grow >= 1, 0 < cut < 1, max_cuts >= 0");
}

TimestepController::TimestepController(TimestepControls c) : c_(c), dt_(c.dt_init) { c_.validate(); }

double TimestepController::propose(double t, double stop) const
{
    const double left = stop - t;
    // avoid leaving a sliver shorter than dt_min before the stop
    if (left <= dt_ || left - dt_ < c_.dt_min)
        return left <= dt_ ? left : 0.5 * left;
    return dt_;
}

void TimestepController::accept(double taken)
{
    dt_ = std::min(std::max(dt_, taken) * c_.grow, c_.dt_max);
    cuts_ = 0;
}

bool TimestepController::cut(double taken)
{
    dt_ = taken * c_.cut;
    ++cuts_;
    if (dt_ < c_.dt_min || cuts_ > c_.max_cuts) {
        dt_ = std::max(dt_, c_.dt_min);
        return false;
    }
    return true;
}

}  // namespace dpsim
