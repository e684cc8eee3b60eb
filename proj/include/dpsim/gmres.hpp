#ifndef DPSIM_GMRES_HPP
#define DPSIM_GMRES_HPP

#include "dpsim/block_matrix.hpp"
#include "dpsim/ilu.hpp"

#include <span>
#include <vector>

namespace dpsim {

struct GmresOptions {
    int restart = 30;
    int max_iters = 200;
    double rtol = 1e-6;
};

struct GmresResult {
    int iterations = 0;
    bool converged = false;
    double rhs_norm = 0.0;
    double residual_norm = 0.0;          // true ||b - A x|| at exit
    std::vector<double> residual_history; // Arnoldi estimates, starting with ||r0||
    std::vector<int> restart_starts;      // history index where each cycle starts
};

/// Restarted right-preconditioned GMRES in the flexible form (the
/// preconditioned directions are stored), so inexact inner solves inside M
/// are allowed. With a fixed linear M it is identical to GMRES(m).
///
/// Works on padded vectors; x holds the initial guess on entry. Stops once
/// ||b - A x|| <= rtol * ||b|| or after max_iters inner iterations.
GmresResult gmres(WorkerPool& pool, const BlockMatrix& a, std::span<const double> b, std::span<double> x,
                  const Preconditioner& m, const GmresOptions& opts);

}  // namespace dpsim

#endif
