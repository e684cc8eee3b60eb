#include "dpsim/gmres.hpp"

#include "dpsim/parallel.hpp"
#include "dpsim/vector_ops.hpp"

#include <algorithm>
#include <cmath>

namespace dpsim {

namespace {

void residual(WorkerPool& pool, const BlockMatrix& a, std::span<const double> b, std::span<const double> x,
              std::span<double> r)
{
    spmv(pool, a, x, r);
    pool.parallel_for(r.size(), [&](std::size_t s, std::size_t e) {
        for (std::size_t i = s; i < e; ++i)
            r[i] = b[i] - r[i];
    }, 4096);
}

}  // namespace

GmresResult gmres(WorkerPool& pool, const BlockMatrix& a, std::span<const double> b, std::span<double> x,
                  const Preconditioner& m, const GmresOptions& opts)
{
    const std::size_t n = b.size();
    const int restart = std::max(1, opts.restart);
    GmresResult res;
    res.rhs_norm = norm2(pool, b);

    std::vector<double> r(n);
    residual(pool, a, b, x, r);
    double beta = norm2(pool, r);
    res.residual_norm = beta;
    res.residual_history.push_back(beta);
    const double target = opts.rtol * res.rhs_norm;
    if (beta <= target || res.rhs_norm == 0.0) {
        res.converged = true;
        return res;
    }

    const auto mr = static_cast<std::size_t>(restart);
    std::vector<std::vector<double>> v(mr + 1, std::vector<double>(n));
    std::vector<std::vector<double>> z(mr, std::vector<double>(n));
    std::vector<double> h((mr + 1) * mr, 0.0);
    std::vector<double> cs(mr), sn(mr), g(mr + 1), y(mr);
    auto H = [&](std::size_t i, std::size_t j) -> double& { return h[i * mr + j]; };

    while (res.iterations < opts.max_iters) {
        res.restart_starts.push_back(static_cast<int>(res.residual_history.size()) - 1);
        std::fill(h.begin(), h.end(), 0.0);
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;
        for (std::size_t i = 0; i < n; ++i)
            v[0][i] = r[i] / beta;

        std::size_t k = 0;
        bool done = false;
        for (; k < mr && res.iterations < opts.max_iters; ++k) {
            m.apply(pool, v[k], z[k]);
            spmv(pool, a, z[k], v[k + 1]);
            for (std::size_t i = 0; i <= k; ++i) {
                H(i, k) = dot(pool, v[k + 1], v[i]);
                axpy(pool, -H(i, k), v[i], v[k + 1]);
            }
            H(k + 1, k) = norm2(pool, v[k + 1]);
            const bool breakdown = !(H(k + 1, k) > 0.0);
            if (!breakdown)
                scale(pool, 1.0 / H(k + 1, k), v[k + 1]);

            for (std::size_t i = 0; i < k; ++i) {
                const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
                H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
                H(i, k) = t;
            }
            const double denom = std::hypot(H(k, k), H(k + 1, k));
            cs[k] = denom > 0.0 ? H(k, k) / denom : 1.0;
            sn[k] = denom > 0.0 ? H(k + 1, k) / denom : 0.0;
            H(k, k) = denom;
            H(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];

            ++res.iterations;
            res.residual_history.push_back(std::abs(g[k + 1]));
            if (std::abs(g[k + 1]) <= target || breakdown) {
                ++k;
                done = true;
                break;
            }
        }

        // back substitution, x += Z y
        for (std::size_t i = k; i-- > 0;) {
            double s = g[i];
            for (std::size_t j = i + 1; j < k; ++j)
                s -= H(i, j) * y[j];
            y[i] = H(i, i) != 0.0 ? s / H(i, i) : 0.0;
        }
        for (std::size_t j = 0; j < k; ++j)
            axpy(pool, y[j], z[j], x);

        residual(pool, a, b, x, r);
        beta = norm2(pool, r);
        res.residual_norm = beta;
        if (beta <= target) {
            res.converged = true;
            return res;
        }
        if (done && !(beta > 0.0))
            break;
        if (!std::isfinite(beta))
            break;
    }
    res.converged = res.residual_norm <= target;
    return res;
}

}  // namespace dpsim
