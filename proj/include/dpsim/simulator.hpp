#ifndef DPSIM_SIMULATOR_HPP
#define DPSIM_SIMULATOR_HPP

#include "dpsim/assembly.hpp"
#include "dpsim/deck.hpp"
#include "dpsim/newton.hpp"
#include "dpsim/parallel.hpp"
#include "dpsim/timestep.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dpsim {

/// Rates are positive in the well's own direction: production for
/// producers, injection for injectors.
struct WellReport {
    double oil_rate = 0.0;    // STB/day
    double water_rate = 0.0;  // STB/day
    double water_rate_rb = 0.0;  // reservoir bbl/day
    double bhp = 0.0;         // psi
    WellControl control = WellControl::Rate;
};

struct ReportRow {
    double time = 0.0;  // day
    std::vector<WellReport> wells;
    double cum_oil_produced = 0.0;    // STB
    double cum_water_produced = 0.0;  // STB
    double cum_water_injected = 0.0;  // STB
    PhasePair mb_error{};             // |dM - dt*Q| / M over the step, per phase
};

struct RunSummary {
    int steps = 0;
    long newton_total = 0;
    long linear_total = 0;
    double wall_seconds = 0.0;
    int cuts = 0;
    int switches = 0;
    bool completed = false;
    std::string failure;
};

/// What an accepted step looked like, for observers.
struct StepInfo {
    int step = 0;
    double time = 0.0;  // end of step
    double dt = 0.0;
    const NewtonReport* newton = nullptr;
    const State* state = nullptr;
    const State* previous = nullptr;
    const ReportRow* row = nullptr;
    long newton_iterations = 0;  // including re-solves and cut attempts
    long linear_iterations = 0;
};

/// Raised when the step size underflows; carries the state that failed.
class ConvergenceFailure : public std::runtime_error {
public:
    ConvergenceFailure(const std::string& what, State state, double time)
        : std::runtime_error(what), state_(std::move(state)), time_(time)
    {
    }
    const State& state() const { return state_; }
    double time() const { return time_; }

private:
    State state_;
    double time_;
};

/// Drives a deck through time: step control, well constraint switching,
/// report rows and checkpoints.
class Simulator {
public:
    Simulator(SimDeck deck, int threads = 1);

    const SimDeck& deck() const { return deck_; }
    const Grid& grid() const { return *grid_; }
    const FlowModel& model() const { return *model_; }
    const State& state() const { return state_; }
    double time() const { return time_; }
    const std::vector<ReportRow>& rows() const { return rows_; }
    const RunSummary& summary() const { return summary_; }
    const std::vector<WellControlState>& controls() const { return controls_; }
    WorkerPool& pool() { return pool_; }
    NewtonConfig& newton_config() { return newton_; }

    void set_step_observer(std::function<void(const StepInfo&)> fn) { on_step_ = std::move(fn); }
    /// Receives every Newton system: (step being attempted, Newton iteration, system).
    void set_linear_system_observer(std::function<void(int, int, const LinearSystem&)> fn);

    /// Marches to min(stop_at, end time). Throws ConvergenceFailure.
    const RunSummary& run(std::optional<double> stop_at = std::nullopt);

    /// Complete restart record as JSON text.
    std::string checkpoint() const;
    void restore(const std::string& json_text);

private:
    void apply_events(double t);
    std::vector<double> stops() const;
    bool check_constraints(const State& x, std::vector<WellControlState>& ctl) const;
    ReportRow make_row(const State& x, const State& prev, double dt);

    SimDeck deck_;
    WorkerPool pool_;
    std::unique_ptr<Grid> grid_;
    std::unique_ptr<FlowModel> model_;
    NewtonConfig newton_;
    TimestepController controller_;
    State state_;
    double time_ = 0.0;
    int step_ = 0;
    std::size_t next_event_ = 0;
    std::vector<WellControlState> controls_;
    std::vector<ReportRow> rows_;
    RunSummary summary_;
    ReportRow totals_;
    std::function<void(const StepInfo&)> on_step_;
    std::function<void(int, int, const LinearSystem&)> on_system_;
};

std::unique_ptr<FlowModel> make_model(const SimDeck& deck, const Grid& grid);

}  // namespace dpsim

#endif
