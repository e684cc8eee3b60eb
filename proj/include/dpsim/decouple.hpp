#ifndef DPSIM_DECOUPLE_HPP
#define DPSIM_DECOUPLE_HPP

#include "dpsim/block_matrix.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpsim {

class WorkerPool;

/// Raised when a diagonal block cannot be inverted.
class SingularBlockError : public std::runtime_error {
public:
    SingularBlockError(std::size_t block_row, const std::string& what)
        : std::runtime_error(what + " (block row " + std::to_string(block_row) + ")"), row_(block_row)
    {
    }
    std::size_t block_row() const { return row_; }

private:
    std::size_t row_;
};

/// Per-block-row left transforms D_i^{-1}, the Gauss-Jordan inverses of the
/// diagonal blocks.
class Decoupler {
public:
    /// Inverts every diagonal block of `a`. Throws SingularBlockError.
    Decoupler(WorkerPool& pool, const BlockMatrix& a);

    /// Left-multiplies every block row of `a` and the padded vector `b` in
    /// place. Afterwards each diagonal block is the identity.
    void apply(WorkerPool& pool, BlockMatrix& a, std::span<double> b) const;

    const double* transform(std::size_t row) const { return inv_.data() + row * len_; }

private:
    int bs_;
    std::size_t len_;
    std::vector<double> inv_;
};

/// Convenience: decouples A and the compact right-hand side b in place.
Decoupler decouple(WorkerPool& pool, BlockMatrix& a, std::span<double> b_compact);

}  // namespace dpsim

#endif
