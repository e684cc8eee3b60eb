#include "dpsim/output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dpsim {

namespace fs = std::filesystem;

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);  // no "-0"
    return buf;
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + p.string());
    return out;
}

}  // namespace

std::string wells_csv_header(const std::vector<WellSpec>& wells)
{
    std::string h = "time_day";
    for (const auto& w : wells) {
        const std::string& n = w.name;
        h += "," + n + "_oil_stb_d," + n + "_water_stb_d," + n + "_water_rb_d," + n + "_bhp_psi," + n + "_control";
    }
    h += ",cum_oil_prod_stb,cum_water_prod_stb,cum_water_inj_stb,mb_err_oil,mb_err_water";
    return h;
}

std::string wells_csv_line(const ReportRow& r)
{
    std::string s = num(r.time);
    for (const auto& w : r.wells) {
        s += "," + num(w.oil_rate) + "," + num(w.water_rate) + "," + num(w.water_rate_rb) + "," + num(w.bhp);
        s += w.control == WellControl::Rate ? ",RATE" : ",BHP";
    }
    s += "," + num(r.cum_oil_produced) + "," + num(r.cum_water_produced) + "," + num(r.cum_water_injected);
    s += "," + num(r.mb_error[0]) + "," + num(r.mb_error[1]);
    return s;
}

void write_wells_csv(const fs::path& path, const std::vector<WellSpec>& wells, const std::vector<ReportRow>& rows)
{
    auto out = open_out(path);
    out << wells_csv_header(wells) << '\n';
    for (const auto& r : rows)
        out << wells_csv_line(r) << '\n';
}

void write_summary(const fs::path& path, const RunSummary& s, const std::string& deck_name, int threads)
{
    auto out = open_out(path);
    out << "deck: " << deck_name << '\n'
        << "threads: " << threads << '\n'
        << "status: " << (s.completed ? "completed" : s.failure.empty() ? "stopped" : "failed") << '\n'
        << "time_steps: " << s.steps << '\n'
        << "newton_iterations: " << s.newton_total << '\n'
        << "linear_iterations: " << s.linear_total << '\n'
        << "timestep_cuts: " << s.cuts << '\n'
        << "constraint_switches: " << s.switches << '\n'
        << "wall_seconds: " << num(s.wall_seconds) << '\n';
    if (!s.failure.empty())
        out << "failure: " << s.failure << '\n';
}

void write_snapshot(const fs::path& path, const Grid& grid, const State& x, double time)
{
    const auto& d = grid.dims();
    auto out = open_out(path);
    out << "# vtk DataFile Version 3.0\n"
        << "dual porosity state at t = " << num(time) << " day\n"
        << "ASCII\n"
        << "DATASET RECTILINEAR_GRID\n"
        << "DIMENSIONS " << d.nx + 1 << ' ' << d.ny + 1 << ' ' << d.nz + 1 << '\n';
    auto coords = [&](const char* name, const std::vector<double>& sizes, int n, double start) {
        out << name << ' ' << n + 1 << " double\n";
        double c = start;
        out << num(c);
        for (int i = 0; i < n; ++i) {
            c += sizes.size() == 1 ? sizes[0] : sizes[static_cast<std::size_t>(i)];
            out << ' ' << num(c);
        }
        out << '\n';
    };
    coords("X_COORDINATES", d.dx, d.nx, 0.0);
    coords("Y_COORDINATES", d.dy, d.ny, 0.0);
    coords("Z_COORDINATES", d.dz, d.nz, grid.depth(0) - 0.5 * grid.dz(0));
    const std::size_t n = grid.num_cells();
    out << "CELL_DATA " << n << '\n';
    const char* names[4] = {"p_f", "s_wf", "p_m", "s_wm"};
    for (int k = 0; k < 4; ++k) {
        out << "SCALARS " << names[k] << " double 1\nLOOKUP_TABLE default\n";
        for (std::size_t c = 0; c < n; ++c)
            out << num(x.cells[4 * c + static_cast<std::size_t>(k)]) << '\n';
    }
}

void write_plot_script(const fs::path& path, const std::vector<WellSpec>& wells)
{
    auto out = open_out(path);
    out << "#!/usr/bin/env python3\n"
           "# Plots oil rate, BHP and water rate per well from wells.csv next to this script.\n"
           "import csv, os, sys\n"
           "import matplotlib\n"
           "matplotlib.use('Agg')\n"
           "import matplotlib.pyplot as plt\n\n"
           "here = os.path.dirname(os.path.abspath(__file__))\n"
           "src = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, 'wells.csv')\n"
           "with open(src) as f:\n"
           "    rows = list(csv.DictReader(f))\n"
           "t = [float(r['time_day']) for r in rows]\n"
           "wells = [";
    for (std::size_t i = 0; i < wells.size(); ++i)
        out << (i ? ", " : "") << "'" << wells[i].name << "'";
    out << "]\n"
           "panels = [('oil_stb_d', 'Oil rate (STB/day)', 'oil_rate.png'),\n"
           "          ('bhp_psi', 'Bottom-hole pressure (psi)', 'bhp.png'),\n"
           "          ('water_stb_d', 'Water rate (STB/day)', 'water_rate.png')]\n"
           "for col, label, name in panels:\n"
           "    fig, ax = plt.subplots(figsize=(7, 4))\n"
           "    for w in wells:\n"
           "        ax.plot(t, [float(r[w + '_' + col]) for r in rows], label=w)\n"
           "    ax.set_xlabel('Time (day)')\n"
           "    ax.set_ylabel(label)\n"
           "    ax.legend()\n"
           "    fig.tight_layout()\n"
           "    fig.savefig(os.path.join(here, name), dpi=120)\n";
}

void write_linear_system(const fs::path& matrix_path, const fs::path& rhs_path, const LinearSystem& sys)
{
    const auto& a = sys.jacobian;
    const std::size_t n = a.compact_size();
    const auto bs = static_cast<std::size_t>(a.block_size());
    const std::size_t nc = a.n_cells();
    auto local = [&](std::size_t blk) { return blk < nc ? bs : std::size_t{1}; };
    auto first = [&](std::size_t blk) { return blk < nc ? blk * bs : nc * bs + (blk - nc); };

    std::size_t nnz = 0;
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    for (std::size_t r = 0; r < a.n_block_rows(); ++r)
        for (std::size_t p = rp[r]; p < rp[r + 1]; ++p)
            nnz += local(r) * local(ci[p]);

    auto m = open_out(matrix_path);
    m << "%%MatrixMarket matrix coordinate real general\n"
      << "% Jacobian, block size " << bs << ", " << nc << " cells, " << a.n_wells() << " wells\n"
      << n << ' ' << n << ' ' << nnz << '\n';
    char buf[80];
    for (std::size_t r = 0; r < a.n_block_rows(); ++r)
        for (std::size_t p = rp[r]; p < rp[r + 1]; ++p) {
            const double* blk = a.block(p);
            for (std::size_t i = 0; i < local(r); ++i)
                for (std::size_t j = 0; j < local(ci[p]); ++j) {
                    std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", first(r) + i + 1, first(ci[p]) + j + 1,
                                  blk[i * bs + j]);
                    m << buf;
                }
        }

    auto b = open_out(rhs_path);
    b << "%%MatrixMarket matrix array real general\n% residual F(x); the Newton right-hand side is -F\n"
      << n << " 1\n";
    for (double v : sys.residual) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        b << buf;
    }
}

void ensure_writable_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    const fs::path probe = dir / ".write_test";
    {
        std::ofstream out(probe);
        if (!out || !(out << "ok"))
            throw std::runtime_error("output directory " + dir.string() + " is not writable");
    }
    fs::remove(probe, ec);
}

}  // namespace dpsim
