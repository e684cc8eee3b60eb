#ifndef DPSIM_LINEAR_SOLVER_HPP
#define DPSIM_LINEAR_SOLVER_HPP

#include "dpsim/block_matrix.hpp"
#include "dpsim/cpr.hpp"
#include "dpsim/gmres.hpp"

#include <span>

namespace dpsim {

class WorkerPool;

enum class PreconditionerKind { Cpr, BlockIlu };

struct LinearSolverConfig {
    PreconditionerKind preconditioner = PreconditionerKind::Cpr;
    CprConfig cpr;
    int restart = 30;
    int max_iters = 200;
    bool decouple = true;
};

struct LinearSolveResult {
    bool converged = false;
    int iterations = 0;
    double rel_residual = 0.0;  // ||b - A y|| / ||b|| of the system handed to GMRES
    long pressure_iterations = 0;
    std::vector<double> history;
};

/// Solves A y = b (compact vectors) to relative tolerance rtol with
/// decoupling + GMRES + the configured preconditioner. `a` is overwritten by
/// its decoupled form. Throws SingularBlockError.
LinearSolveResult solve_linear(WorkerPool& pool, BlockMatrix& a, std::span<const double> b, double rtol,
                               const LinearSolverConfig& cfg, std::span<double> y);

}  // namespace dpsim

#endif
