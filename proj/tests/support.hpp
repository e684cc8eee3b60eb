#ifndef DPSIM_TEST_SUPPORT_HPP
#define DPSIM_TEST_SUPPORT_HPP

#include "dpsim/grid.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace testing {

inline std::string deck_path(const std::string& name) { return std::string(DPSIM_DECK_DIR) + "/" + name; }

inline std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline dpsim::GridDims dims(int nx, int ny, int nz, double dx, double dy, double dz, double top = 0.0)
{
    dpsim::GridDims d;
    d.nx = nx;
    d.ny = ny;
    d.nz = nz;
    d.dx.assign(nx, dx);
    d.dy.assign(ny, dy);
    d.dz.assign(nz, dz);
    d.top_depth = top;
    return d;
}

/// Same permeability on every axis in both continua.
inline dpsim::CellProps uniform_props(double k_f, double phi_f, double k_m, double phi_m, double c_r = 0.0,
                                      double p_ref = 14.7)
{
    dpsim::CellProps p;
    p.fracture = {{k_f}, {k_f}, {k_f}, {phi_f}, c_r, p_ref};
    p.matrix = {{k_m}, {k_m}, {k_m}, {phi_m}, c_r, p_ref};
    return p;
}

}  // namespace testing

#endif
