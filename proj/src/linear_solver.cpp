#include "dpsim/linear_solver.hpp"

#include "dpsim/decouple.hpp"
#include "dpsim/ilu.hpp"

#include <algorithm>
#include <memory>

namespace dpsim {

LinearSolveResult solve_linear(WorkerPool& pool, BlockMatrix& a, std::span<const double> b, double rtol,
                               const LinearSolverConfig& cfg, std::span<double> y)
{
    std::vector<double> bp(a.padded_size(), 0.0);
    a.to_padded(b, bp);
    if (cfg.decouple) {
        const Decoupler dec(pool, a);
        dec.apply(pool, a, bp);
    }

    std::unique_ptr<Preconditioner> m;
    CprFpf* cpr = nullptr;
    if (cfg.preconditioner == PreconditionerKind::Cpr) {
        auto p = std::make_unique<CprFpf>(pool, a, cfg.cpr);
        cpr = p.get();
        m = std::move(p);
    } else {
        m = std::make_unique<BlockIlu0>(pool, a);
    }

    std::vector<double> xp(a.padded_size(), 0.0);
    GmresOptions opts;
    opts.restart = cfg.restart;
    opts.max_iters = cfg.max_iters;
    opts.rtol = rtol;
    const auto g = gmres(pool, a, bp, xp, *m, opts);
    a.to_compact(xp, y);

    LinearSolveResult res;
    res.converged = g.converged;
    res.iterations = g.iterations;
    res.rel_residual = g.rhs_norm > 0.0 ? g.residual_norm / g.rhs_norm : 0.0;
    res.pressure_iterations = cpr ? cpr->pressure_iterations() : 0;
    res.history = g.residual_history;
    return res;
}

}  // namespace dpsim
