#ifndef DPSIM_TEST_RANDOM_BLOCKS_HPP
#define DPSIM_TEST_RANDOM_BLOCKS_HPP

#include "dpsim/block_matrix.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace testing {

/// Random block matrix on a chain of cells (each cell coupled to up to two
/// neighbours on either side), wells attached to random cells. Diagonal blocks
/// get a dominant shift so the matrix is comfortably nonsingular.
template <class Rng>
dpsim::BlockMatrix random_block_matrix(Rng& rng, int bs, std::size_t cells, std::size_t wells, double shift = 4.0)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, cells - 1);
    std::vector<std::vector<std::size_t>> pattern(cells + wells);
    for (std::size_t r = 0; r < cells; ++r)
        for (std::size_t c = (r >= 2 ? r - 2 : 0); c < std::min(cells, r + 3); ++c)
            if (c == r || u(rng) > -0.4)
                pattern[r].push_back(c);
    for (std::size_t w = 0; w < wells; ++w) {
        const std::size_t c = pick(rng);
        pattern[cells + w].push_back(c);
        pattern[c].push_back(cells + w);
    }
    dpsim::BlockMatrix a(bs, cells, wells, pattern);
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    for (std::size_t r = 0; r < a.n_block_rows(); ++r)
        for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) {
            double* blk = a.block(k);
            const bool row_well = r >= cells, col_well = ci[k] >= cells;
            for (int i = 0; i < bs; ++i)
                for (int j = 0; j < bs; ++j) {
                    const bool used = (!row_well || i == 0) && (!col_well || j == 0);
                    blk[i * bs + j] = used ? u(rng) : 0.0;
                    if (used && ci[k] == r && i == j)
                        blk[i * bs + j] += (u(rng) > 0 ? 1.0 : -1.0) * shift;
                }
        }
    a.pad_well_diagonals();
    return a;
}

inline Eigen::MatrixXd dense(const dpsim::BlockMatrix& a)
{
    const auto n = static_cast<Eigen::Index>(a.compact_size());
    const auto d = dpsim::to_dense(a);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = d[static_cast<std::size_t>(i * n + j)];
    return m;
}

inline Eigen::VectorXd as_eigen(const std::vector<double>& v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace testing

#endif
