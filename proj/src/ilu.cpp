#include "dpsim/ilu.hpp"

#include "dpsim/decouple.hpp"
#include "dpsim/dense_block.hpp"
#include "dpsim/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace dpsim {

void IdentityPreconditioner::apply(WorkerPool& /*pool*/, std::span<const double> r, std::span<double> z) const
{
    std::copy(r.begin(), r.end(), z.begin());
}

namespace {

LevelSchedule group_levels(const std::vector<std::size_t>& level_of)
{
    LevelSchedule s;
    std::size_t nlev = 0;
    for (std::size_t l : level_of)
        nlev = std::max(nlev, l + 1);
    s.ptr.assign(nlev + 1, 0);
    for (std::size_t l : level_of)
        ++s.ptr[l + 1];
    for (std::size_t l = 0; l < nlev; ++l)
        s.ptr[l + 1] += s.ptr[l];
    s.rows.resize(level_of.size());
    std::vector<std::size_t> fill(s.ptr.begin(), s.ptr.end() - 1);
    for (std::size_t r = 0; r < level_of.size(); ++r)
        s.rows[fill[level_of[r]]++] = r;
    return s;
}

template <class Fn>
void for_each_level(WorkerPool& pool, const LevelSchedule& s, Fn&& fn)
{
    for (std::size_t lev = 0; lev < s.levels(); ++lev) {
        const std::size_t first = s.ptr[lev];
        const std::size_t count = s.ptr[lev + 1] - first;
        pool.parallel_for(count, [&](std::size_t b, std::size_t e) {
            for (std::size_t k = b; k < e; ++k)
                fn(s.rows[first + k]);
        }, 128);
    }
}

}  // namespace

BlockIlu0::BlockIlu0(WorkerPool& pool, const BlockMatrix& a) : lu_(a)
{
    const std::size_t n = lu_.n_block_rows();
    const int bs = lu_.block_size();
    const std::size_t len = lu_.block_len();
    const auto row_ptr = lu_.row_ptr();
    const auto cols = lu_.col_idx();

    std::vector<std::size_t> lev(n, 0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t pos = row_ptr[r]; pos < lu_.diag_pos(r); ++pos)
            lev[r] = std::max(lev[r], lev[cols[pos]] + 1);
    lower_ = group_levels(lev);
    std::fill(lev.begin(), lev.end(), 0);
    for (std::size_t r = n; r-- > 0;)
        for (std::size_t pos = lu_.diag_pos(r) + 1; pos < row_ptr[r + 1]; ++pos)
            lev[r] = std::max(lev[r], lev[cols[pos]] + 1);
    upper_ = group_levels(lev);  // level 0 = rows with no upper dependencies

    diag_inv_.assign(n * len, 0.0);
    std::atomic<std::size_t> shifted{0};
    std::atomic<std::size_t> failed{kNoBlock};

    for_each_level(pool, lower_, [&](std::size_t i) {
        double tmp[kMaxBlock * kMaxBlock];
        for (std::size_t pos = row_ptr[i]; pos < lu_.diag_pos(i); ++pos) {
            const std::size_t j = cols[pos];
            double* lij = lu_.block(pos);
            dense::mul(lij, diag_inv_.data() + j * len, tmp, bs);
            std::copy(tmp, tmp + len, lij);
            // a_im -= l_ij * u_jm for m > j present in row i
            std::size_t ipos = pos + 1;
            for (std::size_t jpos = lu_.diag_pos(j) + 1; jpos < row_ptr[j + 1]; ++jpos) {
                const std::size_t m = cols[jpos];
                while (ipos < row_ptr[i + 1] && cols[ipos] < m)
                    ++ipos;
                if (ipos == row_ptr[i + 1])
                    break;
                if (cols[ipos] == m)
                    dense::mul_sub(lij, lu_.block(jpos), lu_.block(ipos), bs);
            }
        }
        double* dinv = diag_inv_.data() + i * len;
        double* dblk = lu_.block(lu_.diag_pos(i));
        if (!dense::invert(dblk, dinv, bs)) {
            double row_norm = 0.0;
            for (std::size_t pos = row_ptr[i]; pos < row_ptr[i + 1]; ++pos)
                for (std::size_t k = 0; k < len; ++k)
                    row_norm = std::max(row_norm, std::abs(lu_.block(pos)[k]));
            const double shift = 1e-8 * (row_norm > 0.0 ? row_norm : 1.0);
            for (int k = 0; k < bs; ++k)
                dblk[k * bs + k] += shift;
            shifted.fetch_add(1);
            if (!dense::invert(dblk, dinv, bs)) {
                std::size_t expected = failed.load();
                while (i < expected && !failed.compare_exchange_weak(expected, i)) {
                }
            }
        }
    });
    shifted_ = shifted.load();
    if (failed.load() != kNoBlock)
        throw SingularBlockError(failed.load(), "ILU(0) zero pivot");
}

void BlockIlu0::apply(WorkerPool& pool, std::span<const double> r, std::span<double> z) const
{
    const int bs = lu_.block_size();
    const auto sbs = static_cast<std::size_t>(bs);
    const std::size_t len = lu_.block_len();
    const auto row_ptr = lu_.row_ptr();
    const auto cols = lu_.col_idx();
    // forward: z = L^{-1} r
    for_each_level(pool, lower_, [&](std::size_t i) {
        double acc[kMaxBlock];
        for (int k = 0; k < bs; ++k)
            acc[k] = r[i * sbs + static_cast<std::size_t>(k)];
        for (std::size_t pos = row_ptr[i]; pos < lu_.diag_pos(i); ++pos)
            dense::matvec_sub(lu_.block(pos), z.data() + cols[pos] * sbs, acc, bs);
        std::copy(acc, acc + bs, z.data() + i * sbs);
    });
    // backward: z = U^{-1} z
    for_each_level(pool, upper_, [&](std::size_t i) {
        double acc[kMaxBlock];
        for (int k = 0; k < bs; ++k)
            acc[k] = z[i * sbs + static_cast<std::size_t>(k)];
        for (std::size_t pos = lu_.diag_pos(i) + 1; pos < row_ptr[i + 1]; ++pos)
            dense::matvec_sub(lu_.block(pos), z.data() + cols[pos] * sbs, acc, bs);
        dense::matvec(diag_inv_.data() + i * len, acc, z.data() + i * sbs, bs);
    });
}

}  // namespace dpsim
