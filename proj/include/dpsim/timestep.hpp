#ifndef DPSIM_TIMESTEP_HPP
#define DPSIM_TIMESTEP_HPP

namespace dpsim {

struct TimestepControls {
    double dt_init = 1.0;  // day
    double dt_min = 0.01;
    double dt_max = 50.0;
    double grow = 2.0;
    double cut = 0.5;
    int max_cuts = 10;  // consecutive

    void validate() const;
};

/// Grow-on-success / cut-on-failure step control. `dt()` is the desired step;
/// the step actually taken is truncated so it ends exactly on the next stop
/// (schedule or report date).
class TimestepController {
public:
    explicit TimestepController(TimestepControls c = {});

    double dt() const { return dt_; }
    int consecutive_cuts() const { return cuts_; }

    /// Step to take from time t when the next stop is at `stop`.
    double propose(double t, double stop) const;
    /// Success with step `taken`.
    void accept(double taken);
    /// Failure with step `taken`. False once the step would drop below
    /// dt_min or the consecutive-cut limit is exceeded.
    bool cut(double taken);

    void restore(double dt, int cuts)
    {
        dt_ = dt;
        cuts_ = cuts;
    }
    const TimestepControls& controls() const { return c_; }

private:
    TimestepControls c_;
    double dt_;
    int cuts_ = 0;
};

}  // namespace dpsim

#endif
