#ifndef DPSIM_VECTOR_OPS_HPP
#define DPSIM_VECTOR_OPS_HPP

#include <span>

namespace dpsim {

class WorkerPool;

// Reductions sum fixed-length chunks in parallel and combine the partial sums
// in chunk order, so results are bitwise independent of the worker count.
double dot(WorkerPool& pool, std::span<const double> x, std::span<const double> y);
double norm2(WorkerPool& pool, std::span<const double> x);
double norm_inf(std::span<const double> x);

/// y += alpha*x
void axpy(WorkerPool& pool, double alpha, std::span<const double> x, std::span<double> y);
/// x *= alpha
void scale(WorkerPool& pool, double alpha, std::span<double> x);

}  // namespace dpsim

#endif
