#include "dpsim/cpr.hpp"

#include "dpsim/parallel.hpp"

#include <algorithm>
#include <stdexcept>

namespace dpsim {

CprFpf::CprFpf(WorkerPool& pool, const BlockMatrix& a, CprConfig config)
    : a_(a), cfg_(std::move(config)), smoother_(pool, a)
{
    const int bs = a.block_size();
    const auto sbs = static_cast<std::size_t>(bs);
    auto& ps = cfg_.pressure_indices;
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    if (ps.empty())
        throw std::invalid_argument("CPR: pressure set is empty");
    for (int idx : ps)
        if (idx < 0 || idx >= bs)
            throw std::invalid_argument("CPR: pressure index outside the block");

    const std::size_t np = ps.size();
    const std::size_t nc = a.n_cells(), nw = a.n_wells();
    const std::size_t n_press = nc * np + nw;
    // first pressure row of each block row, and how many it owns
    auto first_row = [&](std::size_t blk) { return blk < nc ? blk * np : nc * np + (blk - nc); };
    auto rows_of = [&](std::size_t blk) { return blk < nc ? np : std::size_t{1}; };
    auto local_index = [&](std::size_t blk, std::size_t k) { return blk < nc ? ps[k] : 0; };

    p_map_.resize(n_press);
    for (std::size_t blk = 0; blk < nc + nw; ++blk)
        for (std::size_t k = 0; k < rows_of(blk); ++k)
            p_map_[first_row(blk) + k] = blk * sbs + static_cast<std::size_t>(local_index(blk, k));

    const auto row_ptr = a.row_ptr();
    const auto cols = a.col_idx();
    std::vector<std::vector<std::size_t>> pattern(n_press);
    for (std::size_t blk = 0; blk < nc + nw; ++blk)
        for (std::size_t k = 0; k < rows_of(blk); ++k) {
            auto& row = pattern[first_row(blk) + k];
            for (std::size_t pos = row_ptr[blk]; pos < row_ptr[blk + 1]; ++pos)
                for (std::size_t l = 0; l < rows_of(cols[pos]); ++l)
                    row.push_back(first_row(cols[pos]) + l);
        }
    app_ = BlockMatrix(1, n_press, 0, std::move(pattern));
    for (std::size_t blk = 0; blk < nc + nw; ++blk)
        for (std::size_t k = 0; k < rows_of(blk); ++k) {
            const std::size_t prow = first_row(blk) + k;
            const auto li = static_cast<std::size_t>(local_index(blk, k));
            for (std::size_t pos = row_ptr[blk]; pos < row_ptr[blk + 1]; ++pos) {
                const std::size_t c = cols[pos];
                for (std::size_t l = 0; l < rows_of(c); ++l) {
                    const auto lj = static_cast<std::size_t>(local_index(c, l));
                    const std::size_t ppos = app_.find(prow, first_row(c) + l);
                    app_.block(ppos)[0] = a.block(pos)[li * sbs + lj];
                }
            }
        }
    pressure_ilu_.emplace(pool, app_);

    r1_.resize(a.padded_size());
    tmp_.resize(a.padded_size());
    rp_.resize(n_press);
    dp_.resize(n_press);
}

void CprFpf::restrict_to_pressure(std::span<const double> full, std::span<double> p) const
{
    for (std::size_t i = 0; i < p_map_.size(); ++i)
        p[i] = full[p_map_[i]];
}

void CprFpf::prolong_add(std::span<const double> p, std::span<double> full) const
{
    for (std::size_t i = 0; i < p_map_.size(); ++i)
        full[p_map_[i]] += p[i];
}

void CprFpf::apply(WorkerPool& pool, std::span<const double> r, std::span<double> z) const
{
    const std::size_t n = r.size();
    auto residual_into = [&](std::span<double> out) {
        spmv(pool, a_, z, tmp_);
        pool.parallel_for(n, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                out[i] = r[i] - tmp_[i];
        }, 4096);
    };

    // F
    smoother_.apply(pool, r, z);

    // P
    residual_into(r1_);
    restrict_to_pressure(r1_, rp_);
    std::fill(dp_.begin(), dp_.end(), 0.0);
    if (cfg_.pressure_solver == PressureSolverKind::Ilu0) {
        pressure_ilu_->apply(pool, rp_, dp_);
    } else {
        GmresOptions opts;
        opts.restart = cfg_.pressure_max_iters;
        opts.max_iters = cfg_.pressure_max_iters;
        opts.rtol = cfg_.pressure_rtol;
        const auto res = gmres(pool, app_, rp_, dp_, *pressure_ilu_, opts);
        pressure_its_ += res.iterations;
    }
    prolong_add(dp_, z);

    // F
    residual_into(r1_);
    smoother_.apply(pool, r1_, tmp_);
    pool.parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            z[i] += tmp_[i];
    }, 4096);
}

}  // namespace dpsim
