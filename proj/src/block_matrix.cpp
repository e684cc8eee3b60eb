#include "dpsim/block_matrix.hpp"

#include "dpsim/parallel.hpp"

#include <algorithm>
#include <stdexcept>

namespace dpsim {

BlockMatrix::BlockMatrix(int block_size, std::size_t n_cells, std::size_t n_wells,
                         std::vector<std::vector<std::size_t>> pattern)
    : bs_(block_size), n_cells_(n_cells), n_wells_(n_wells)
{
    if (bs_ < 1 || bs_ > kMaxBlock)
        throw std::invalid_argument("block size must be in [1, 4]");
    const std::size_t nrows = n_cells + n_wells;
    if (pattern.size() != nrows)
        throw std::invalid_argument("block pattern has wrong number of rows");
    row_ptr_.assign(nrows + 1, 0);
    diag_.resize(nrows);
    for (std::size_t r = 0; r < nrows; ++r) {
        auto& cols = pattern[r];
        cols.push_back(r);
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        if (cols.back() >= nrows)
            throw std::invalid_argument("block pattern column out of range");
        row_ptr_[r + 1] = row_ptr_[r] + cols.size();
    }
    col_.reserve(row_ptr_[nrows]);
    for (std::size_t r = 0; r < nrows; ++r) {
        for (std::size_t c : pattern[r]) {
            if (c == r)
                diag_[r] = col_.size();
            col_.push_back(c);
        }
    }
    values_.assign(col_.size() * block_len(), 0.0);
}

std::size_t BlockMatrix::find(std::size_t row, std::size_t col) const
{
    const auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
    const auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
    const auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col)
        return kNoBlock;
    return static_cast<std::size_t>(it - col_.begin());
}

void BlockMatrix::set_zero()
{
    std::fill(values_.begin(), values_.end(), 0.0);
}

void BlockMatrix::pad_well_diagonals()
{
    for (std::size_t w = 0; w < n_wells_; ++w) {
        double* b = block(diag_[n_cells_ + w]);
        for (int k = 1; k < bs_; ++k)
            b[k * bs_ + k] = 1.0;
    }
}

std::size_t BlockMatrix::padded_index(std::size_t compact) const
{
    const std::size_t cell_part = static_cast<std::size_t>(bs_) * n_cells_;
    if (compact < cell_part)
        return compact;
    return cell_part + static_cast<std::size_t>(bs_) * (compact - cell_part);
}

double BlockMatrix::entry(std::size_t row, std::size_t col) const
{
    const std::size_t pr = padded_index(row), pc = padded_index(col);
    const std::size_t bs = static_cast<std::size_t>(bs_);
    const std::size_t pos = find(pr / bs, pc / bs);
    if (pos == kNoBlock)
        return 0.0;
    return block(pos)[(pr % bs) * bs + pc % bs];
}

void BlockMatrix::to_padded(std::span<const double> compact, std::span<double> padded) const
{
    const std::size_t cell_part = static_cast<std::size_t>(bs_) * n_cells_;
    std::copy(compact.begin(), compact.begin() + static_cast<std::ptrdiff_t>(cell_part), padded.begin());
    std::fill(padded.begin() + static_cast<std::ptrdiff_t>(cell_part), padded.end(), 0.0);
    for (std::size_t w = 0; w < n_wells_; ++w)
        padded[cell_part + static_cast<std::size_t>(bs_) * w] = compact[cell_part + w];
}

void BlockMatrix::to_compact(std::span<const double> padded, std::span<double> compact) const
{
    const std::size_t cell_part = static_cast<std::size_t>(bs_) * n_cells_;
    std::copy(padded.begin(), padded.begin() + static_cast<std::ptrdiff_t>(cell_part), compact.begin());
    for (std::size_t w = 0; w < n_wells_; ++w)
        compact[cell_part + w] = padded[cell_part + static_cast<std::size_t>(bs_) * w];
}

void spmv(WorkerPool& pool, const BlockMatrix& a, std::span<const double> x, std::span<double> y)
{
    const int bs = a.block_size();
    const auto row_ptr = a.row_ptr();
    const auto cols = a.col_idx();
    pool.parallel_for(a.n_block_rows(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            double acc[kMaxBlock] = {0.0, 0.0, 0.0, 0.0};
            for (std::size_t pos = row_ptr[r]; pos < row_ptr[r + 1]; ++pos) {
                const double* blk = a.block(pos);
                const double* xc = x.data() + cols[pos] * static_cast<std::size_t>(bs);
                for (int i = 0; i < bs; ++i)
                    for (int j = 0; j < bs; ++j)
                        acc[i] += blk[i * bs + j] * xc[j];
            }
            for (int i = 0; i < bs; ++i)
                y[r * static_cast<std::size_t>(bs) + static_cast<std::size_t>(i)] = acc[i];
        }
    }, 64);
}

std::vector<double> multiply(WorkerPool& pool, const BlockMatrix& a, std::span<const double> x)
{
    std::vector<double> xp(a.padded_size()), yp(a.padded_size()), y(a.compact_size());
    a.to_padded(x, xp);
    spmv(pool, a, xp, yp);
    a.to_compact(yp, y);
    return y;
}

std::vector<double> to_dense(const BlockMatrix& a)
{
    const std::size_t n = a.compact_size();
    std::vector<double> dense(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            dense[r * n + c] = a.entry(r, c);
    return dense;
}

}  // namespace dpsim
