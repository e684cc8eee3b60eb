#include "dpsim/decouple.hpp"

#include "dpsim/dense_block.hpp"
#include "dpsim/parallel.hpp"

#include <atomic>

namespace dpsim {

Decoupler::Decoupler(WorkerPool& pool, const BlockMatrix& a)
    : bs_(a.block_size()), len_(a.block_len()), inv_(a.n_block_rows() * a.block_len())
{
    std::atomic<std::size_t> bad{kNoBlock};
    pool.parallel_for(a.n_block_rows(), [&](std::size_t b, std::size_t e) {
        for (std::size_t r = b; r < e; ++r)
            if (!dense::invert(a.block(a.diag_pos(r)), inv_.data() + r * len_, bs_)) {
                std::size_t expected = kNoBlock;
                // keep the smallest failing row for a reproducible message
                while (r < (expected = bad.load()) && !bad.compare_exchange_weak(expected, r)) {
                }
            }
    });
    if (bad.load() != kNoBlock)
        throw SingularBlockError(bad.load(), "singular diagonal block");
}

void Decoupler::apply(WorkerPool& pool, BlockMatrix& a, std::span<double> b) const
{
    const auto row_ptr = a.row_ptr();
    pool.parallel_for(a.n_block_rows(), [&](std::size_t begin, std::size_t end) {
        double tmp[kMaxBlock * kMaxBlock];
        for (std::size_t r = begin; r < end; ++r) {
            const double* d = transform(r);
            for (std::size_t pos = row_ptr[r]; pos < row_ptr[r + 1]; ++pos) {
                double* blk = a.block(pos);
                dense::mul(d, blk, tmp, bs_);
                std::copy(tmp, tmp + len_, blk);
            }
            double* br = b.data() + r * static_cast<std::size_t>(bs_);
            dense::matvec(d, br, tmp, bs_);
            std::copy(tmp, tmp + bs_, br);
        }
    }, 64);
}

Decoupler decouple(WorkerPool& pool, BlockMatrix& a, std::span<double> b_compact)
{
    Decoupler dec(pool, a);
    std::vector<double> bp(a.padded_size());
    a.to_padded(b_compact, bp);
    dec.apply(pool, a, bp);
    a.to_compact(bp, b_compact);
    return dec;
}

}  // namespace dpsim
