#include "dpsim/block_matrix.hpp"
#include "dpsim/cpr.hpp"
#include "dpsim/decouple.hpp"
#include "dpsim/dense_block.hpp"
#include "dpsim/gmres.hpp"
#include "dpsim/ilu.hpp"
#include "dpsim/linear_solver.hpp"
#include "dpsim/parallel.hpp"
#include "dpsim/vector_ops.hpp"
#include "random_blocks.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dpsim;
using namespace dpsim::dense;
using testing::random_block_matrix;

namespace {

BlockMatrix identity(int bs, std::size_t cells)
{
    std::vector<std::vector<std::size_t>> pattern(cells);
    BlockMatrix a(bs, cells, 0, pattern);
    for (std::size_t r = 0; r < cells; ++r)
        for (int i = 0; i < bs; ++i)
            a.block(a.diag_pos(r))[i * bs + i] = 1.0;
    return a;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v)
        x = u(rng);
    return v;
}

double max_abs_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("dense block inverse")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int bs = 1; bs <= 4; ++bs)
        for (int trial = 0; trial < 20; ++trial) {
            double a[16], inv[16], prod[16];
            for (int i = 0; i < bs * bs; ++i)
                a[i] = u(rng);
            if (!invert(a, inv, bs))
                continue;
            mul(a, inv, prod, bs);
            for (int i = 0; i < bs; ++i)
                for (int j = 0; j < bs; ++j)
                    CHECK(prod[i * bs + j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9).scale(1.0));
        }
    double z[4] = {0, 0, 0, 0}, out[4];
    CHECK_FALSE(invert(z, out, 2));
    double sing[4] = {1, 2, 2, 4};
    CHECK_FALSE(invert(sing, out, 2));
}

TEST_CASE("block SpMV")
{
    WorkerPool pool(2);
    std::mt19937_64 rng(2);
    const BlockMatrix a = random_block_matrix(rng, 4, 2, 1);
    const auto x = random_vector(rng, a.compact_size());
    const auto y = multiply(pool, a, x);
    const Eigen::VectorXd ref = testing::dense(a) * testing::as_eigen(x);
    CHECK(max_abs_diff(testing::as_eigen(y), ref) < 1e-13);

    const std::vector<double> zero(a.compact_size(), 0.0);
    for (double v : multiply(pool, a, zero))
        CHECK(v == 0.0);
    const BlockMatrix eye = identity(3, 5);
    const auto x2 = random_vector(rng, eye.compact_size());
    CHECK(multiply(pool, eye, x2) == x2);
}

TEST_CASE("decoupling")
{
    WorkerPool pool(1);
    std::mt19937_64 rng(3);
    SUBCASE("identity diagonal blocks leave A unchanged")
    {
        BlockMatrix a = random_block_matrix(rng, 4, 4, 0);
        for (std::size_t r = 0; r < a.n_block_rows(); ++r) {
            double* d = a.block(a.diag_pos(r));
            for (int i = 0; i < 16; ++i)
                d[i] = i % 5 == 0 ? 1.0 : 0.0;
        }
        const auto before = a.values();
        auto b = random_vector(rng, a.compact_size());
        const auto b0 = b;
        decouple(pool, a, b);
        CHECK(a.values() == before);
        CHECK(b == b0);
    }
    SUBCASE("one cell: D^-1 A = I and D^-1 b solves the system")
    {
        BlockMatrix a = random_block_matrix(rng, 4, 1, 0);
        const Eigen::MatrixXd a0 = testing::dense(a);
        auto b = random_vector(rng, 4);
        const Eigen::VectorXd direct = a0.partialPivLu().solve(testing::as_eigen(b));
        decouple(pool, a, b);
        CHECK((testing::dense(a) - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-13);
        CHECK(max_abs_diff(testing::as_eigen(b), direct) < 1e-12);
    }
    SUBCASE("two cells and a well: same solution, identity diagonal")
    {
        for (int trial = 0; trial < 10; ++trial) {
            BlockMatrix a = random_block_matrix(rng, 4, 2, 1);
            auto b = random_vector(rng, a.compact_size());
            const Eigen::VectorXd x0 = testing::dense(a).partialPivLu().solve(testing::as_eigen(b));
            decouple(pool, a, b);
            const Eigen::VectorXd x1 = testing::dense(a).partialPivLu().solve(testing::as_eigen(b));
            CHECK(max_abs_diff(x0, x1) <= 1e-12 * x0.cwiseAbs().maxCoeff());
            for (std::size_t r = 0; r < a.n_block_rows(); ++r) {
                const double* d = a.block(a.diag_pos(r));
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j)
                        CHECK(std::abs(d[i * 4 + j] - (i == j ? 1.0 : 0.0)) < 1e-13);
            }
        }
    }
    SUBCASE("singular diagonal block")
    {
        BlockMatrix a = random_block_matrix(rng, 2, 3, 0);
        double* d = a.block(a.diag_pos(1));
        for (int i = 0; i < 4; ++i)
            d[i] = 0.0;
        std::vector<double> b(a.compact_size(), 1.0);
        CHECK_THROWS_AS(decouple(pool, a, b), SingularBlockError);
    }
}

TEST_CASE("GMRES")
{
    WorkerPool pool(1);
    IdentityPreconditioner none;
    SUBCASE("2x2 SPD system")
    {
        BlockMatrix a(1, 2, 0, {{0, 1}, {0, 1}});
        a.block(a.find(0, 0))[0] = 4.0;
        a.block(a.find(0, 1))[0] = 1.0;
        a.block(a.find(1, 0))[0] = 1.0;
        a.block(a.find(1, 1))[0] = 3.0;
        std::vector<double> b{1.0, 2.0}, x{0.0, 0.0};
        const auto r = gmres(pool, a, b, x, none, {30, 200, 1e-12});
        CHECK(r.converged);
        CHECK(x[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-11));
        CHECK(x[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-11));
        CHECK(r.iterations <= 2);
    }
    SUBCASE("identity converges in one iteration")
    {
        const BlockMatrix a = identity(4, 6);
        std::mt19937_64 rng(4);
        const auto b = random_vector(rng, a.padded_size());
        std::vector<double> x(b.size(), 0.0);
        const auto r = gmres(pool, a, b, x, none, {30, 200, 1e-10});
        CHECK(r.converged);
        CHECK(r.iterations == 1);
    }
    SUBCASE("residual estimate never grows inside a restart cycle")
    {
        std::mt19937_64 rng(5);
        const BlockMatrix a = random_block_matrix(rng, 4, 8, 2);
        const auto b = random_vector(rng, a.padded_size());
        std::vector<double> x(b.size(), 0.0);
        const auto r = gmres(pool, a, b, x, none, {10, 200, 1e-10});
        CHECK(r.converged);
        auto starts = r.restart_starts;
        starts.push_back(static_cast<int>(r.residual_history.size()));
        for (std::size_t c = 0; c + 1 < starts.size(); ++c)
            for (int k = starts[c] + 1; k < starts[c + 1]; ++k)
                CHECK(r.residual_history[k] <= r.residual_history[k - 1] * (1.0 + 1e-12));
    }
    SUBCASE("true residual meets the tolerance")
    {
        std::mt19937_64 rng(6);
        const BlockMatrix a = random_block_matrix(rng, 2, 8, 1);
        const auto bc = random_vector(rng, a.compact_size());
        std::vector<double> b(a.padded_size()), x(a.padded_size(), 0.0);
        a.to_padded(bc, b);
        const auto r = gmres(pool, a, b, x, none, {30, 200, 1e-8});
        std::vector<double> xc(a.compact_size());
        a.to_compact(x, xc);
        const Eigen::VectorXd res = testing::as_eigen(bc) - testing::dense(a) * testing::as_eigen(xc);
        CHECK(res.norm() <= 1e-8 * testing::as_eigen(bc).norm() * (1.0 + 1e-6));
    }
}

TEST_CASE("block ILU(0) is exact on a block-tridiagonal matrix")
{
    WorkerPool pool(1);
    std::mt19937_64 rng(7);
    const std::size_t n = 6;
    std::vector<std::vector<std::size_t>> pattern(n);
    for (std::size_t r = 0; r < n; ++r) {
        if (r > 0)
            pattern[r].push_back(r - 1);
        if (r + 1 < n)
            pattern[r].push_back(r + 1);
    }
    BlockMatrix a(2, n, 0, pattern);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : a.values())
        v = u(rng);
    for (std::size_t r = 0; r < n; ++r) {
        a.block(a.diag_pos(r))[0] += 5.0;
        a.block(a.diag_pos(r))[3] += 5.0;
    }
    const BlockIlu0 ilu(pool, a);
    const auto b = random_vector(rng, a.padded_size());
    std::vector<double> z(b.size());
    ilu.apply(pool, b, z);
    const Eigen::VectorXd direct = testing::dense(a).partialPivLu().solve(testing::as_eigen(b));
    CHECK(max_abs_diff(testing::as_eigen(z), direct) < 1e-12);
}

TEST_CASE("CPR preconditioner")
{
    WorkerPool pool(1);
    SUBCASE("identity")
    {
        const BlockMatrix a = identity(4, 5);
        CprFpf m(pool, a, {});
        std::mt19937_64 rng(8);
        const auto r = random_vector(rng, a.padded_size());
        std::vector<double> z(r.size());
        m.apply(pool, r, z);
        for (std::size_t i = 0; i < r.size(); ++i)
            CHECK(z[i] == doctest::Approx(r[i]).epsilon(1e-14));
    }
    SUBCASE("zero in, zero out")
    {
        std::mt19937_64 rng(9);
        BlockMatrix a = random_block_matrix(rng, 4, 6, 1);
        std::vector<double> b(a.compact_size(), 0.0);
        decouple(pool, a, b);
        CprFpf m(pool, a, {});
        const std::vector<double> r(a.padded_size(), 0.0);
        std::vector<double> z(r.size(), 1.0);
        m.apply(pool, r, z);
        for (double v : z)
            CHECK(v == 0.0);
    }
    SUBCASE("restriction and prolongation pick the pressure unknowns")
    {
        std::mt19937_64 rng(10);
        const BlockMatrix a = random_block_matrix(rng, 4, 3, 1);
        CprFpf m(pool, a, {});
        std::vector<double> full(a.padded_size());
        for (std::size_t i = 0; i < full.size(); ++i)
            full[i] = static_cast<double>(i);
        std::vector<double> p(m.pressure_matrix().padded_size());
        m.restrict_to_pressure(full, p);
        // cells: (p_f, p_m) at local 0 and 2; the well at local 0 of its block row
        const std::vector<double> expect{0, 2, 4, 6, 8, 10, 12};
        std::vector<double> pc(m.pressure_matrix().compact_size());
        m.pressure_matrix().to_compact(p, pc);
        CHECK(pc == expect);
    }
}

TEST_CASE("linear solver configurations agree")
{
    WorkerPool pool(1);
    std::mt19937_64 rng(11);
    const BlockMatrix a0 = random_block_matrix(rng, 4, 8, 2);
    const auto b = random_vector(rng, a0.compact_size());
    const Eigen::VectorXd direct = testing::dense(a0).partialPivLu().solve(testing::as_eigen(b));
    for (auto kind : {PreconditionerKind::Cpr, PreconditionerKind::BlockIlu})
        for (bool dec : {true, false}) {
            LinearSolverConfig cfg;
            cfg.preconditioner = kind;
            cfg.decouple = dec;
            BlockMatrix a = a0;
            std::vector<double> y(b.size(), 0.0);
            const auto r = solve_linear(pool, a, b, 1e-11, cfg, y);
            CHECK(r.converged);
            CHECK(max_abs_diff(testing::as_eigen(y), direct) < 1e-8 * direct.cwiseAbs().maxCoeff());
        }
}

TEST_CASE("reductions do not depend on the worker count")
{
    std::mt19937_64 rng(12);
    const auto x = random_vector(rng, 100003);
    const auto y = random_vector(rng, 100003);
    WorkerPool p1(1), p3(3), p8(8);
    const double d1 = dot(p1, x, y);
    CHECK(dot(p3, x, y) == d1);
    CHECK(dot(p8, x, y) == d1);
    CHECK(norm2(p8, x) == norm2(p1, x));
    double m = 0.0;
    for (double v : x)
        m = std::max(m, std::abs(v));
    CHECK(norm_inf(x) == m);
}
