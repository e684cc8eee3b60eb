#include "dpsim/grid.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace dpsim;
using testing::dims;
using testing::uniform_props;

TEST_CASE("cell depths are layer centers below the top face")
{
    const Grid g = build_grid(dims(10, 10, 1, 102.04, 102.04, 100.0, 2000.0), uniform_props(395.85, 0.04, 100, 0.14));
    for (std::size_t c = 0; c < g.num_cells(); ++c)
        CHECK(g.depth(c) == doctest::Approx(2050.0));

    const Grid g3 = build_grid(dims(2, 2, 3, 10, 10, 20, 100.0), uniform_props(1, 0.1, 1, 0.1));
    CHECK(g3.depth(g3.index(1, 1, 0)) == doctest::Approx(110.0));
    CHECK(g3.depth(g3.index(0, 1, 2)) == doctest::Approx(150.0));
}

TEST_CASE("connection counts")
{
    CHECK(build_grid(dims(1, 1, 1, 1, 1, 1), uniform_props(1, 0.1, 1, 0.1)).connections().empty());
    const Grid g2 = build_grid(dims(2, 1, 1, 1, 1, 1), uniform_props(1, 0.1, 1, 0.1));
    REQUIRE(g2.connections().size() == 1);
    CHECK(g2.connections()[0].axis == Axis::X);

    for (auto [nx, ny, nz] : {std::array{3, 3, 1}, std::array{4, 2, 3}, std::array{1, 5, 2}}) {
        const Grid g = build_grid(dims(nx, ny, nz, 1, 1, 1), uniform_props(1, 0.1, 1, 0.1));
        const std::size_t expect = static_cast<std::size_t>((nx - 1) * ny * nz + nx * (ny - 1) * nz + nx * ny * (nz - 1));
        CHECK(g.connections().size() == expect);
        CHECK(expected_connection_count(nx, ny, nz) == expect);

        // every connection is between 6-neighbours, i < j, no duplicates
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (const auto& c : g.connections()) {
            CHECK(c.cell_i < c.cell_j);
            CHECK(seen.insert({c.cell_i, c.cell_j}).second);
            const auto a = g.ijk(c.cell_i), b = g.ijk(c.cell_j);
            CHECK(std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]) == 1);
        }
        // each cell's adjacency lists its connections in increasing order
        for (std::size_t cell = 0; cell < g.num_cells(); ++cell) {
            const auto list = g.cell_connections(cell);
            for (std::size_t k = 1; k < list.size(); ++k)
                CHECK(list[k - 1] < list[k]);
        }
    }
}

TEST_CASE("face transmissibility")
{
    CHECK(face_transmissibility(102.04, 100.0, 102.04, 100.0, 102.04 * 100.0) == doctest::Approx(11.27).epsilon(1e-13));
    CHECK(face_transmissibility(10.0, 0.0, 10.0, 100.0, 50.0) == 0.0);
    CHECK(face_transmissibility(10.0, 5.0, 30.0, 80.0, 50.0) == face_transmissibility(30.0, 80.0, 10.0, 5.0, 50.0));
    // series resistances: 1/T = dx_i/(2 k_i A) + dx_j/(2 k_j A)
    const double t = face_transmissibility(10.0, 5.0, 30.0, 80.0, 50.0);
    CHECK(t == doctest::Approx(0.001127 / (10.0 / (2 * 5.0 * 50.0) + 30.0 / (2 * 80.0 * 50.0))));

    const Grid g = build_grid(dims(2, 1, 1, 102.04, 102.04, 100.0), uniform_props(100.0, 0.1, 1.0, 0.1));
    CHECK(g.connections()[0].trans == doctest::Approx(11.27).epsilon(1e-13));
}

TEST_CASE("shape factors")
{
    CHECK(shape_factor({10, 10, 10}, ShapeFactorModel::Kazemi) == doctest::Approx(0.12).epsilon(1e-15));
    CHECK(shape_factor({7, kInactiveAxis, kInactiveAxis}, ShapeFactorModel::Kazemi) == doctest::Approx(4.0 / 49.0));
    CHECK(shape_factor({10, kInactiveAxis, kInactiveAxis}, ShapeFactorModel::WarrenRoot, 1) ==
          doctest::Approx(0.12).epsilon(1e-15));
    CHECK(shape_factor({10, 10, 10}, ShapeFactorModel::WarrenRoot, 3) == doctest::Approx(4.0 * 3 * 5 / 100.0));
    CHECK_THROWS(shape_factor({0, 10, 10}, ShapeFactorModel::Kazemi));
}

TEST_CASE("grid sigma follows the spacing")
{
    auto p = uniform_props(100, 0.05, 10, 0.2);
    p.frac_spacing = {{10.0, 10.0, 10.0}};
    const Grid g = build_grid(dims(2, 2, 1, 50, 50, 20), p);
    for (std::size_t c = 0; c < g.num_cells(); ++c) {
        CHECK(g.sigma(c) == doctest::Approx(0.12));
        CHECK(g.transfer_perm(c) == 10.0);
        CHECK(g.volume(c) == doctest::Approx(50.0 * 50.0 * 20.0));
    }
    Grid h = g;
    h.set_sigma(0.0);
    CHECK(h.sigma(3) == 0.0);
}

TEST_CASE("grid validation")
{
    CHECK_THROWS(build_grid(dims(0, 1, 1, 1, 1, 1), uniform_props(1, 0.1, 1, 0.1)));
    CHECK_THROWS(build_grid(dims(2, 1, 1, -1, 1, 1), uniform_props(1, 0.1, 1, 0.1)));
    CHECK_THROWS(build_grid(dims(2, 1, 1, 1, 1, 1), uniform_props(-1, 0.1, 1, 0.1)));
    CHECK_THROWS(build_grid(dims(2, 1, 1, 1, 1, 1), uniform_props(1, 1.5, 1, 0.1)));
}
