#ifndef DPSIM_CPR_HPP
#define DPSIM_CPR_HPP

#include "dpsim/block_matrix.hpp"
#include "dpsim/gmres.hpp"
#include "dpsim/ilu.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace dpsim {

enum class PressureSolverKind {
    Krylov,  // ILU(0)-preconditioned GMRES, loose tolerance
    Ilu0     // a single ILU(0) application
};

struct CprConfig {
    std::vector<int> pressure_indices{0, 2};  // p_f and p_m
    PressureSolverKind pressure_solver = PressureSolverKind::Krylov;
    int pressure_max_iters = 30;
    double pressure_rtol = 1e-1;
};

/// Two-level CPR preconditioner applied in full-pressure-full order:
///   z  = S r                          (block ILU(0) on the full system)
///   z += P A_pp^{-1} R (r - A z)      (pressure correction)
///   z += S (r - A z)                  (second full-system sweep)
/// R/P inject onto the pressure unknowns of each cell (and each well's BHP).
/// Expects a decoupled matrix, so A_pp is the pressure block of D^{-1}A.
class CprFpf final : public Preconditioner {
public:
    CprFpf(WorkerPool& pool, const BlockMatrix& a, CprConfig config);

    void apply(WorkerPool& pool, std::span<const double> r, std::span<double> z) const override;

    const BlockMatrix& pressure_matrix() const { return app_; }
    /// Inner pressure iterations summed over all applications.
    long pressure_iterations() const { return pressure_its_; }

    /// R_p: padded full vector -> pressure vector.
    void restrict_to_pressure(std::span<const double> full, std::span<double> p) const;
    /// full += P_p p
    void prolong_add(std::span<const double> p, std::span<double> full) const;

private:
    const BlockMatrix& a_;
    CprConfig cfg_;
    BlockIlu0 smoother_;
    BlockMatrix app_;
    std::optional<BlockIlu0> pressure_ilu_;
    std::vector<std::size_t> p_map_;  // pressure index -> padded index
    mutable std::vector<double> r1_, tmp_, rp_, dp_;
    mutable long pressure_its_ = 0;
};

}  // namespace dpsim

#endif
