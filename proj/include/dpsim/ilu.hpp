#ifndef DPSIM_ILU_HPP
#define DPSIM_ILU_HPP

#include "dpsim/block_matrix.hpp"

#include <span>
#include <vector>

namespace dpsim {

class WorkerPool;

/// Right-preconditioner interface on padded vectors: z = M^{-1} r.
class Preconditioner {
public:
    virtual ~Preconditioner() = default;
    virtual void apply(WorkerPool& pool, std::span<const double> r, std::span<double> z) const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
public:
    void apply(WorkerPool& pool, std::span<const double> r, std::span<double> z) const override;
};

/// Rows grouped into dependency levels of a triangular sweep.
struct LevelSchedule {
    std::vector<std::size_t> ptr;   // level boundaries into rows
    std::vector<std::size_t> rows;
    std::size_t levels() const { return ptr.empty() ? 0 : ptr.size() - 1; }
};

/// Block ILU(0) on the pattern of A. Factorization and both triangular
/// sweeps are level-scheduled; each row's arithmetic is the same for any
/// worker count.
class BlockIlu0 final : public Preconditioner {
public:
    BlockIlu0(WorkerPool& pool, const BlockMatrix& a);

    void apply(WorkerPool& pool, std::span<const double> r, std::span<double> z) const override;

    /// Number of diagonal blocks that needed a shift to be invertible.
    std::size_t shifted_pivots() const { return shifted_; }
    const LevelSchedule& lower_schedule() const { return lower_; }

private:
    BlockMatrix lu_;                   // strict lower: L (unit diagonal implied); upper: U off-diagonal
    std::vector<double> diag_inv_;     // inverses of U diagonal blocks
    LevelSchedule lower_, upper_;
    std::size_t shifted_ = 0;
};

}  // namespace dpsim

#endif
