#include "dpsim/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dpsim {

namespace {

void broadcast(std::vector<double>& v, std::size_t n, const std::string& what)
{
    if (v.size() == 1 && n > 1)
        v.assign(n, v.front());
    if (v.size() != n)
        throw std::invalid_argument(what + ": expected " + std::to_string(n) + " values, got " +
                                    std::to_string(v.size()));
}

void check_positive(const std::vector<double>& v, const std::string& what)
{
    for (double x : v)
        if (!(x > 0.0))
            throw std::invalid_argument(what + " must be positive");
}

void prepare_continuum(ContinuumProps& c, std::size_t n, const std::string& name)
{
    broadcast(c.perm_x, n, name + " perm_x");
    broadcast(c.perm_y, n, name + " perm_y");
    broadcast(c.perm_z, n, name + " perm_z");
    broadcast(c.phi_ref, n, name + " porosity");
    for (const auto* v : {&c.perm_x, &c.perm_y, &c.perm_z})
        for (double k : *v)
            if (!(k >= 0.0))
                throw std::invalid_argument(name + " permeability must be >= 0");
    for (std::size_t i = 0; i < n; ++i)
        c.rock(i).validate(name);
}

}  // namespace

double face_transmissibility(double len_i, double k_i, double len_j, double k_j, double area)
{
    if (k_i <= 0.0 || k_j <= 0.0)
        return 0.0;
    const double resistance = len_i / (2.0 * k_i * area) + len_j / (2.0 * k_j * area);
    return UnitConstants::darcy / resistance;
}

double shape_factor(const std::array<double, 3>& spacing, ShapeFactorModel model, int fracture_sets)
{
    for (double l : spacing)
        if (!(l > 0.0))
            throw std::invalid_argument("fracture spacing must be positive");
    if (model == ShapeFactorModel::Kazemi) {
        double sum = 0.0;
        for (double l : spacing)
            if (std::isfinite(l))
                sum += 1.0 / (l * l);
        return 4.0 * sum;
    }
    // Warren-Root with a single representative spacing: the first finite one.
    double l = 0.0;
    for (double s : spacing)
        if (std::isfinite(s)) {
            l = s;
            break;
        }
    if (l == 0.0)
        return 0.0;
    const double n = fracture_sets;
    return 4.0 * n * (n + 2.0) / (l * l);
}

std::size_t expected_connection_count(int nx, int ny, int nz)
{
    const auto x = static_cast<std::size_t>(nx), y = static_cast<std::size_t>(ny), z = static_cast<std::size_t>(nz);
    return (x - 1) * y * z + x * (y - 1) * z + x * y * (z - 1);
}

Grid::Grid(GridDims dims, CellProps props) : dims_(std::move(dims)), props_(std::move(props))
{
    if (dims_.nx < 1 || dims_.ny < 1 || dims_.nz < 1)
        throw std::invalid_argument("grid dimensions must be >= 1");
    broadcast(dims_.dx, static_cast<std::size_t>(dims_.nx), "DX");
    broadcast(dims_.dy, static_cast<std::size_t>(dims_.ny), "DY");
    broadcast(dims_.dz, static_cast<std::size_t>(dims_.nz), "DZ");
    check_positive(dims_.dx, "DX");
    check_positive(dims_.dy, "DY");
    check_positive(dims_.dz, "DZ");

    n_ = static_cast<std::size_t>(dims_.nx) * dims_.ny * dims_.nz;
    prepare_continuum(props_.fracture, n_, "fracture");
    prepare_continuum(props_.matrix, n_, "matrix");

    volume_.resize(n_);
    depth_.resize(n_);
    std::vector<double> layer_depth(static_cast<std::size_t>(dims_.nz));
    double top = dims_.top_depth;
    for (int k = 0; k < dims_.nz; ++k) {
        layer_depth[k] = top + 0.5 * dims_.dz[k];
        top += dims_.dz[k];
    }
    for (std::size_t c = 0; c < n_; ++c) {
        const auto [i, j, k] = ijk(c);
        volume_[c] = dims_.dx[i] * dims_.dy[j] * dims_.dz[k];
        depth_[c] = layer_depth[k];
    }

    if (props_.frac_spacing.empty()) {
        props_.frac_spacing.resize(n_);
        for (std::size_t c = 0; c < n_; ++c)
            props_.frac_spacing[c] = {dx(c), dy(c), dz(c)};
    } else if (props_.frac_spacing.size() == 1 && n_ > 1) {
        props_.frac_spacing.assign(n_, props_.frac_spacing.front());
    }
    if (props_.frac_spacing.size() != n_)
        throw std::invalid_argument("fracture spacing: wrong number of cells");

    const auto& shape = props_.shape;
    sigma_.resize(n_);
    for (std::size_t c = 0; c < n_; ++c) {
        if (shape.constant) {
            if (shape.sigma_value < 0.0)
                throw std::invalid_argument("shape factor must be >= 0");
            sigma_[c] = shape.sigma_value;
        } else if (shape.model == ShapeFactorModel::WarrenRoot && shape.representative_l > 0.0) {
            sigma_[c] = shape_factor({shape.representative_l, kInactiveAxis, kInactiveAxis},
                                     ShapeFactorModel::WarrenRoot, shape.fracture_sets);
        } else {
            sigma_[c] = shape_factor(props_.frac_spacing[c], shape.model, shape.fracture_sets);
        }
    }

    km_.resize(n_);
    const auto& m = props_.matrix;
    for (std::size_t c = 0; c < n_; ++c) {
        const double kx = m.perm_x[c], ky = m.perm_y[c], kz = m.perm_z[c];
        switch (props_.transfer_perm) {
        case TransferPerm::X: km_[c] = kx; break;
        case TransferPerm::Arithmetic: km_[c] = (kx + ky + kz) / 3.0; break;
        case TransferPerm::Geometric: km_[c] = std::cbrt(kx * ky * kz); break;
        case TransferPerm::Harmonic:
            km_[c] = (kx > 0 && ky > 0 && kz > 0) ? 3.0 / (1.0 / kx + 1.0 / ky + 1.0 / kz) : 0.0;
            break;
        }
    }

    // Interior faces, x then y then z sweeps in natural order of the lower cell.
    connections_.reserve(expected_connection_count(dims_.nx, dims_.ny, dims_.nz));
    for (std::size_t c = 0; c < n_; ++c) {
        const auto [i, j, k] = ijk(c);
        if (i + 1 < dims_.nx)
            connections_.push_back({c, index(i + 1, j, k), face_transmissibility(c, index(i + 1, j, k), Axis::X),
                                    Axis::X, depth_[c], depth_[index(i + 1, j, k)]});
        if (j + 1 < dims_.ny)
            connections_.push_back({c, index(i, j + 1, k), face_transmissibility(c, index(i, j + 1, k), Axis::Y),
                                    Axis::Y, depth_[c], depth_[index(i, j + 1, k)]});
        if (k + 1 < dims_.nz)
            connections_.push_back({c, index(i, j, k + 1), face_transmissibility(c, index(i, j, k + 1), Axis::Z),
                                    Axis::Z, depth_[c], depth_[index(i, j, k + 1)]});
    }

    conn_ptr_.assign(n_ + 1, 0);
    for (const auto& conn : connections_) {
        ++conn_ptr_[conn.cell_i + 1];
        ++conn_ptr_[conn.cell_j + 1];
    }
    for (std::size_t c = 0; c < n_; ++c)
        conn_ptr_[c + 1] += conn_ptr_[c];
    conn_index_.resize(conn_ptr_[n_]);
    std::vector<std::size_t> fill(conn_ptr_.begin(), conn_ptr_.end() - 1);
    for (std::size_t idx = 0; idx < connections_.size(); ++idx) {
        conn_index_[fill[connections_[idx].cell_i]++] = idx;
        conn_index_[fill[connections_[idx].cell_j]++] = idx;
    }
}

std::array<int, 3> Grid::ijk(std::size_t cell) const
{
    const auto nx = static_cast<std::size_t>(dims_.nx), ny = static_cast<std::size_t>(dims_.ny);
    return {static_cast<int>(cell % nx), static_cast<int>((cell / nx) % ny), static_cast<int>(cell / (nx * ny))};
}

double Grid::face_transmissibility(std::size_t ci, std::size_t cj, Axis axis) const
{
    const auto& f = props_.fracture;
    switch (axis) {
    case Axis::X:
        return dpsim::face_transmissibility(dx(ci), f.perm_x[ci], dx(cj), f.perm_x[cj], dy(ci) * dz(ci));
    case Axis::Y:
        return dpsim::face_transmissibility(dy(ci), f.perm_y[ci], dy(cj), f.perm_y[cj], dx(ci) * dz(ci));
    case Axis::Z:
        return dpsim::face_transmissibility(dz(ci), f.perm_z[ci], dz(cj), f.perm_z[cj], dx(ci) * dy(ci));
    }
    return 0.0;
}

void Grid::shift_depth(double offset)
{
    dims_.top_depth += offset;
    for (auto& d : depth_)
        d += offset;
    for (auto& c : connections_) {
        c.depth_i += offset;
        c.depth_j += offset;
    }
}

void Grid::set_sigma(double sigma)
{
    sigma_.assign(n_, sigma);
}

Grid build_grid(GridDims dims, CellProps props)
{
    return Grid(std::move(dims), std::move(props));
}

}  // namespace dpsim
