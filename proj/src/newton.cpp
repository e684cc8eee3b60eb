#include "dpsim/newton.hpp"

#include "dpsim/decouple.hpp"
#include "dpsim/parallel.hpp"
#include "dpsim/vector_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dpsim {

double forcing_term(const ForcingRule& rule, const ForcingInputs& in, double eta_min, double eta_max)
{
    if (rule.kind == ForcingRule::Kind::Constant)
        return rule.value;
    if (!(in.norm_b_prev > 0.0))
        return eta_min;
    double eta = 0.0;
    switch (rule.kind) {
    case ForcingRule::Kind::EW1:
        eta = in.norm_b_minus_r / in.norm_b_prev;
        break;
    case ForcingRule::Kind::EW2:
        eta = std::abs(in.norm_b - in.norm_r_prev) / in.norm_b_prev;
        break;
    case ForcingRule::Kind::EW3:
        eta = rule.gamma * std::pow(in.norm_b / in.norm_b_prev, rule.beta);
        break;
    case ForcingRule::Kind::Constant:
        break;
    }
    if (!std::isfinite(eta))
        eta = eta_max;
    return std::clamp(eta, eta_min, eta_max);
}

const char* to_string(NewtonOutcome o)
{
    switch (o) {
    case NewtonOutcome::Converged: return "converged";
    case NewtonOutcome::Diverged: return "diverged";
    case NewtonOutcome::MaxIters: return "max_iters";
    case NewtonOutcome::LinearFailure: return "linear_failure";
    }
    return "?";
}

int NewtonReport::linear_total() const
{
    return std::accumulate(linear_iterations.begin(), linear_iterations.end(), 0);
}

namespace {

PhasePair mb_error(const FlowModel& model, const LinearSystem& sys, const State& x, double dt)
{
    const auto defect = model.mass_balance_defect(sys, dt);
    const auto mass = model.mass_in_place(x);
    const double total = mass[0] + mass[1];
    PhasePair e{};
    for (int a = 0; a < 2; ++a) {
        const double denom = mass[a] > 0.0 ? mass[a] : total;
        e[a] = denom > 0.0 ? std::abs(defect[a]) / denom : std::abs(defect[a]);
    }
    return e;
}

}  // namespace

NewtonResult solve_timestep(WorkerPool& pool, const FlowModel& model, const State& old, const State& guess, double dt,
                            std::span<const WellControlState> controls, const NewtonConfig& cfg)
{
    NewtonResult out{guess, {}};
    State& x = out.state;
    NewtonReport& rep = out.report;

    LinearSystem sys = model.make_system();
    model.assemble(pool, x, old, dt, controls, sys);
    rep.porosity_clamps = sys.porosity_clamps;

    auto converged = [&](double n2) {
        if (!(n2 < cfg.epsilon) || !(norm_inf(sys.residual) < cfg.epsilon))
            return false;
        rep.mb_error = mb_error(model, sys, x, dt);
        return rep.mb_error[0] < cfg.mb_tol && rep.mb_error[1] < cfg.mb_tol;
    };

    double nb = norm2(pool, sys.residual);
    const double nb0 = nb;
    rep.residual_history.push_back(nb);
    if (converged(nb)) {
        rep.outcome = NewtonOutcome::Converged;
        return out;
    }
    if (!std::isfinite(nb)) {
        rep.outcome = NewtonOutcome::Diverged;
        rep.failure_reason = "non-finite residual at the initial guess";
        return out;
    }

    const std::size_t n = sys.residual.size();
    std::vector<double> b(n), y(n), r_prev(n), diff(n);
    ForcingInputs fin;

    for (int l = 0; l < cfg.max_iters; ++l) {
        double eta = 0.0;
        if (cfg.forcing.kind == ForcingRule::Kind::Constant)
            eta = cfg.forcing.value;
        else
            eta = l == 0 ? cfg.eta_initial : forcing_term(cfg.forcing, fin, cfg.eta_min, cfg.eta_max);
        rep.forcing.push_back(eta);

        if (cfg.on_linear_system)
            cfg.on_linear_system(l, sys);

        for (std::size_t i = 0; i < n; ++i)
            b[i] = -sys.residual[i];
        const BlockMatrix jac = sys.jacobian;  // decoupling overwrites sys.jacobian
        std::fill(y.begin(), y.end(), 0.0);
        LinearSolveResult lin;
        try {
            lin = solve_linear(pool, sys.jacobian, b, eta, cfg.linear, y);
        } catch (const SingularBlockError& e) {
            rep.outcome = NewtonOutcome::LinearFailure;
            rep.failure_reason = e.what();
            return out;
        }
        rep.linear_iterations.push_back(lin.iterations);
        rep.linear_rel_residual.push_back(lin.rel_residual);
        rep.pressure_iterations += lin.pressure_iterations;
        if (!lin.converged) {
            rep.outcome = NewtonOutcome::LinearFailure;
            rep.failure_reason = "GMRES did not reach rtol " + std::to_string(eta) + " in " +
                                 std::to_string(lin.iterations) + " iterations";
            return out;
        }

        // r^{l} = b - A y in the undecoupled system, for the EW1/EW2 rules
        const auto ay = multiply(pool, jac, y);
        for (std::size_t i = 0; i < n; ++i)
            r_prev[i] = b[i] - ay[i];

        model.apply_update(x, y, cfg.max_dp, cfg.max_ds);
        model.assemble(pool, x, old, dt, controls, sys);
        rep.porosity_clamps = sys.porosity_clamps;
        const double nb_new = norm2(pool, sys.residual);
        ++rep.iterations;
        rep.residual_history.push_back(nb_new);

        if (!std::isfinite(nb_new) || nb_new > cfg.divergence_factor * nb0) {
            rep.outcome = NewtonOutcome::Diverged;
            rep.failure_reason = "residual norm " + std::to_string(nb_new) + " after " +
                                 std::to_string(rep.iterations) + " iterations";
            return out;
        }
        if (converged(nb_new)) {
            rep.outcome = NewtonOutcome::Converged;
            return out;
        }

        // b(x^{l+1}) - r^{l}; b = -residual
        for (std::size_t i = 0; i < n; ++i)
            diff[i] = -sys.residual[i] - r_prev[i];
        fin.norm_b_prev = nb;
        fin.norm_b = nb_new;
        fin.norm_r_prev = norm2(pool, r_prev);
        fin.norm_b_minus_r = norm2(pool, diff);
        nb = nb_new;
    }
    rep.outcome = NewtonOutcome::MaxIters;
    rep.mb_error = mb_error(model, sys, x, dt);
    rep.failure_reason = "no convergence in " + std::to_string(cfg.max_iters) + " iterations";
    return out;
}

}  // namespace dpsim
