#ifndef DPSIM_GRID_HPP
#define DPSIM_GRID_HPP

#include "dpsim/props.hpp"

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace dpsim {

enum class Axis { X = 0, Y = 1, Z = 2 };

struct GridDims {
    int nx = 1, ny = 1, nz = 1;
    std::vector<double> dx, dy, dz;  // ft; one entry per column/row/layer
    double top_depth = 0.0;          // ft; depth of the top face of layer 0
};

/// Rock description of one continuum, one entry per cell.
struct ContinuumProps {
    std::vector<double> perm_x, perm_y, perm_z;  // mD
    std::vector<double> phi_ref;                 // fraction
    double c_r = 0.0;                            // 1/psi
    double p_ref = 14.7;                         // psi

    RockCompressibility rock(std::size_t cell) const { return {phi_ref[cell], c_r, p_ref}; }
};

enum class ShapeFactorModel { Kazemi, WarrenRoot };

/// Matrix permeability used in the transfer term.
enum class TransferPerm { X, Arithmetic, Geometric, Harmonic };

/// Use as a spacing component to drop that axis from the Kazemi sum.
inline constexpr double kInactiveAxis = std::numeric_limits<double>::infinity();

struct ShapeFactorSpec {
    ShapeFactorModel model = ShapeFactorModel::Kazemi;
    int fracture_sets = 3;        // Warren-Root n
    double representative_l = 0;  // Warren-Root L, ft; <= 0 means cell-derived
    bool constant = false;        // sigma given directly
    double sigma_value = 0.0;
};

struct CellProps {
    ContinuumProps fracture;
    ContinuumProps matrix;
    // Matrix block dimensions (L_x, L_y, L_z) per cell; empty -> cell sizes.
    std::vector<std::array<double, 3>> frac_spacing;
    ShapeFactorSpec shape;
    TransferPerm transfer_perm = TransferPerm::X;
};

struct Connection {
    std::size_t cell_i = 0;
    std::size_t cell_j = 0;
    double trans = 0.0;  // mD*ft*0.001127, fracture continuum
    Axis axis = Axis::X;
    double depth_i = 0.0;
    double depth_j = 0.0;
};

/// Two-point transmissibility between adjacent cells with harmonic averaging
/// of the axis permeabilities. Zero if either permeability is zero.
/// len_i, len_j are the cell lengths along the connection axis (ft), area the
/// shared face area (ft^2).
double face_transmissibility(double len_i, double k_i, double len_j, double k_j, double area);

/// Shape factor sigma in 1/ft^2.
double shape_factor(const std::array<double, 3>& spacing, ShapeFactorModel model, int fracture_sets = 3);

class Grid {
public:
    Grid(GridDims dims, CellProps props);

    const GridDims& dims() const { return dims_; }
    std::size_t num_cells() const { return n_; }

    std::size_t index(int i, int j, int k) const
    {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(dims_.nx) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims_.ny) * k);
    }
    std::array<int, 3> ijk(std::size_t cell) const;

    double dx(std::size_t cell) const { return dims_.dx[ijk(cell)[0]]; }
    double dy(std::size_t cell) const { return dims_.dy[ijk(cell)[1]]; }
    double dz(std::size_t cell) const { return dims_.dz[ijk(cell)[2]]; }
    double volume(std::size_t cell) const { return volume_[cell]; }
    double depth(std::size_t cell) const { return depth_[cell]; }
    double sigma(std::size_t cell) const { return sigma_[cell]; }
    /// Matrix permeability entering the transfer term.
    double transfer_perm(std::size_t cell) const { return km_[cell]; }

    const CellProps& props() const { return props_; }
    const std::vector<Connection>& connections() const { return connections_; }

    /// Connections touching `cell`, in increasing connection index.
    std::span<const std::size_t> cell_connections(std::size_t cell) const
    {
        return {conn_index_.data() + conn_ptr_[cell], conn_ptr_[cell + 1] - conn_ptr_[cell]};
    }

    /// Transmissibility of the face between adjacent cells on `axis`.
    double face_transmissibility(std::size_t cell_i, std::size_t cell_j, Axis axis) const;

    /// Shifts every depth by `offset` ft.
    void shift_depth(double offset);
    /// Overrides sigma everywhere.
    void set_sigma(double sigma);

private:
    GridDims dims_;
    CellProps props_;
    std::size_t n_ = 0;
    std::vector<double> volume_, depth_, sigma_, km_;
    std::vector<Connection> connections_;
    std::vector<std::size_t> conn_ptr_, conn_index_;
};

Grid build_grid(GridDims dims, CellProps props);

/// Expected connection count for a structured grid.
std::size_t expected_connection_count(int nx, int ny, int nz);

}  // namespace dpsim

#endif
