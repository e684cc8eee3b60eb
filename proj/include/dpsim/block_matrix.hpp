#ifndef DPSIM_BLOCK_MATRIX_HPP
#define DPSIM_BLOCK_MATRIX_HPP

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace dpsim {

class WorkerPool;

inline constexpr int kMaxBlock = 4;
inline constexpr std::size_t kNoBlock = std::numeric_limits<std::size_t>::max();

/// Block-CSR matrix with bs x bs dense blocks (row-major payloads).
///
/// Block rows [0, n_cells) are grid cells in natural order; rows
/// [n_cells, n_cells + n_wells) are wells. A well has one scalar unknown and
/// one equation; its block row stores them at local index 0 and the unused
/// diagonal entries are 1, so the whole matrix is a uniform block matrix.
/// Vectors come in two layouts: compact (bs*n_cells + n_wells scalars, the
/// residual/unknown layout) and padded (bs*(n_cells + n_wells)).
class BlockMatrix {
public:
    BlockMatrix() = default;
    /// `pattern[r]` lists the block columns of block row r; the diagonal is
    /// always added. Duplicates are merged and columns sorted.
    BlockMatrix(int block_size, std::size_t n_cells, std::size_t n_wells,
                std::vector<std::vector<std::size_t>> pattern);

    int block_size() const { return bs_; }
    std::size_t n_cells() const { return n_cells_; }
    std::size_t n_wells() const { return n_wells_; }
    std::size_t n_block_rows() const { return n_cells_ + n_wells_; }
    std::size_t compact_size() const { return static_cast<std::size_t>(bs_) * n_cells_ + n_wells_; }
    std::size_t padded_size() const { return static_cast<std::size_t>(bs_) * n_block_rows(); }
    std::size_t n_blocks() const { return col_.size(); }

    std::span<const std::size_t> row_ptr() const { return row_ptr_; }
    std::span<const std::size_t> col_idx() const { return col_; }
    std::size_t diag_pos(std::size_t row) const { return diag_[row]; }

    double* block(std::size_t pos) { return values_.data() + pos * block_len(); }
    const double* block(std::size_t pos) const { return values_.data() + pos * block_len(); }
    std::size_t block_len() const { return static_cast<std::size_t>(bs_) * bs_; }

    /// Position of block (row, col), or kNoBlock.
    std::size_t find(std::size_t row, std::size_t col) const;

    void set_zero();
    /// Writes 1 on the unused diagonal entries of well block rows.
    void pad_well_diagonals();

    /// Scalar entry at compact indices; 0 outside the pattern.
    double entry(std::size_t row, std::size_t col) const;

    bool same_pattern(const BlockMatrix& other) const
    {
        return bs_ == other.bs_ && row_ptr_ == other.row_ptr_ && col_ == other.col_;
    }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    // compact <-> padded index maps
    std::size_t padded_index(std::size_t compact) const;
    void to_padded(std::span<const double> compact, std::span<double> padded) const;
    void to_compact(std::span<const double> padded, std::span<double> compact) const;

private:
    int bs_ = 1;
    std::size_t n_cells_ = 0, n_wells_ = 0;
    std::vector<std::size_t> row_ptr_, col_, diag_;
    std::vector<double> values_;
};

/// y = A x on padded vectors.
void spmv(WorkerPool& pool, const BlockMatrix& a, std::span<const double> x, std::span<double> y);

/// y = A x on compact vectors.
std::vector<double> multiply(WorkerPool& pool, const BlockMatrix& a, std::span<const double> x);

/// Dense copy (compact layout, row-major), for tests and debugging.
std::vector<double> to_dense(const BlockMatrix& a);

}  // namespace dpsim

#endif
