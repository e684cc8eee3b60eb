#ifndef DPSIM_OUTPUT_HPP
#define DPSIM_OUTPUT_HPP

#include "dpsim/assembly.hpp"
#include "dpsim/simulator.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dpsim {

/// Header line of wells.csv for the given wells.
std::string wells_csv_header(const std::vector<WellSpec>& wells);
std::string wells_csv_line(const ReportRow& row);
void write_wells_csv(const std::filesystem::path& path, const std::vector<WellSpec>& wells,
                     const std::vector<ReportRow>& rows);

void write_summary(const std::filesystem::path& path, const RunSummary& s, const std::string& deck_name,
                   int threads);

/// Legacy VTK rectilinear-grid file with p_f, s_wf, p_m, s_wm cell data.
/// Z coordinates are depths (ft), increasing downward.
void write_snapshot(const std::filesystem::path& path, const Grid& grid, const State& x, double time);

/// Python/matplotlib script that plots oil rate, BHP and water rate from wells.csv.
void write_plot_script(const std::filesystem::path& path, const std::vector<WellSpec>& wells);

/// Jacobian in Matrix Market coordinate form and the residual as a
/// Matrix Market array, both in compact unknown ordering.
void write_linear_system(const std::filesystem::path& matrix_path, const std::filesystem::path& rhs_path,
                         const LinearSystem& sys);

/// Creates `dir` if needed and proves it writable. Throws std::runtime_error.
void ensure_writable_dir(const std::filesystem::path& dir);

}  // namespace dpsim

#endif
