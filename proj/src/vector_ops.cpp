#include "dpsim/vector_ops.hpp"

#include "dpsim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dpsim {

namespace {

template <class ChunkFn>
double chunked_sum(WorkerPool& pool, std::size_t n, ChunkFn&& chunk_sum)
{
    const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
    if (chunks <= 1)
        return n == 0 ? 0.0 : chunk_sum(0, n);
    std::vector<double> partial(chunks);
    pool.parallel_for(chunks, [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c)
            partial[c] = chunk_sum(c * kReductionChunk, std::min(n, (c + 1) * kReductionChunk));
    }, 1);
    double total = 0.0;
    for (double p : partial)
        total += p;
    return total;
}

}  // namespace

double dot(WorkerPool& pool, std::span<const double> x, std::span<const double> y)
{
    return chunked_sum(pool, x.size(), [&](std::size_t b, std::size_t e) {
        double s = 0.0;
        for (std::size_t i = b; i < e; ++i)
            s += x[i] * y[i];
        return s;
    });
}

double norm2(WorkerPool& pool, std::span<const double> x)
{
    return std::sqrt(dot(pool, x, x));
}

double norm_inf(std::span<const double> x)
{
    double m = 0.0;
    for (double v : x) {
        if (std::isnan(v))
            return v;
        m = std::max(m, std::abs(v));
    }
    return m;
}

void axpy(WorkerPool& pool, double alpha, std::span<const double> x, std::span<double> y)
{
    pool.parallel_for(x.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            y[i] += alpha * x[i];
    }, 4096);
}

void scale(WorkerPool& pool, double alpha, std::span<double> x)
{
    pool.parallel_for(x.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            x[i] *= alpha;
    }, 4096);
}

}  // namespace dpsim
