#ifndef DPSIM_NEWTON_HPP
#define DPSIM_NEWTON_HPP

#include "dpsim/assembly.hpp"
#include "dpsim/linear_solver.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dpsim {

class WorkerPool;

/// How the linear tolerance eta_l of each Newton iteration is chosen.
struct ForcingRule {
    enum class Kind { Constant, EW1, EW2, EW3 };
    Kind kind = Kind::EW3;
    double value = 0.1;  // Constant
    double gamma = 0.9;  // EW3
    double beta = 2.0;   // EW3

    static ForcingRule constant(double eta) { return {Kind::Constant, eta, 0.9, 2.0}; }
    static ForcingRule ew1() { return {Kind::EW1, 0.1, 0.9, 2.0}; }
    static ForcingRule ew2() { return {Kind::EW2, 0.1, 0.9, 2.0}; }
    static ForcingRule ew3(double gamma = 0.9, double beta = 2.0) { return {Kind::EW3, 0.1, gamma, beta}; }
};

/// Norms entering the forcing rules at iteration l.
struct ForcingInputs {
    double norm_b = 0.0;            // ||b(x^l)||
    double norm_b_prev = 0.0;       // ||b(x^{l-1})||
    double norm_r_prev = 0.0;       // ||r^{l-1}||, r = b - A y of the previous solve
    double norm_b_minus_r = 0.0;    // ||b(x^l) - r^{l-1}||
};

/// eta_l for the EW rules, clamped to [eta_min, eta_max]; a zero previous
/// norm gives eta_min. The constant rule returns its value unclamped.
double forcing_term(const ForcingRule& rule, const ForcingInputs& in, double eta_min = 1e-4, double eta_max = 0.9);

struct NewtonConfig {
    double epsilon = 1e-4;  // on the V/dt-normalized residual, 2- and inf-norm
    int max_iters = 15;
    ForcingRule forcing;
    double eta_min = 1e-4;
    double eta_max = 0.9;
    double eta_initial = 0.1;
    double max_dp = 500.0;   // psi per iteration
    double max_ds = 0.2;     // per iteration
    double mb_tol = 1e-7;    // per-phase material-balance defect / mass in place
    double divergence_factor = 1e4;
    LinearSolverConfig linear;
    /// Called with each Jacobian and residual before it is solved.
    std::function<void(int iteration, const LinearSystem&)> on_linear_system;
};

enum class NewtonOutcome { Converged, Diverged, MaxIters, LinearFailure };

const char* to_string(NewtonOutcome o);

struct NewtonReport {
    int iterations = 0;
    std::vector<double> residual_history;  // ||b(x^l)||, iterations + 1 entries
    std::vector<double> forcing;           // eta_l per iteration
    std::vector<int> linear_iterations;    // per iteration
    std::vector<double> linear_rel_residual;
    long pressure_iterations = 0;
    PhasePair mb_error{};                  // at the returned state
    std::size_t porosity_clamps = 0;
    NewtonOutcome outcome = NewtonOutcome::MaxIters;
    std::string failure_reason;

    int linear_total() const;
    bool converged() const { return outcome == NewtonOutcome::Converged; }
};

struct NewtonResult {
    State state;
    NewtonReport report;
};

/// One backward-Euler step from `old` to old + dt, starting the iteration
/// at `guess`.
NewtonResult solve_timestep(WorkerPool& pool, const FlowModel& model, const State& old, const State& guess, double dt,
                            std::span<const WellControlState> controls, const NewtonConfig& cfg);

}  // namespace dpsim

#endif
