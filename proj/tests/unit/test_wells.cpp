#include "dpsim/wells.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace dpsim;
using std::numbers::pi;

namespace {

FluidProps unit_fluid()
{
    FluidProps f;
    f.oil = {1000.0, 1.0, 0.0, 1.0, 50.0, FvfForm::Exponential};
    f.water = {1000.0, 1.0, 0.0, 1.0, 62.4, FvfForm::Exponential};
    return f;
}

// k_rw = k_ro = 1 everywhere, no capillary pressure
SatFuncTable flat_table() { return SatFuncTable({{0.0, 1.0, 1.0, 0.0}, {1.0, 1.0, 1.0, 0.0}}); }

}  // namespace

TEST_CASE("circle effective radius")
{
    CHECK(effective_radius_circle(1.0, pi, 1.0) == 1.0);
    CHECK(effective_radius_circle(1.0, 102.04 * 102.04, 1.0) == doctest::Approx(57.56990510521306).epsilon(1e-14));
    const double a = effective_radius_circle(1.0, 800.0, 0.5);
    CHECK(effective_radius_circle(1.0, 1600.0, 0.5) == doctest::Approx(a * std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("Peaceman effective radius")
{
    const double iso = effective_radius_peaceman({102.04, 102.04, 100.0}, {50.0, 50.0, 5.0}, Axis::Z);
    CHECK(iso == doctest::Approx(0.28 * std::sqrt(2.0) * 102.04 / 2.0).epsilon(1e-14));
    CHECK(iso == doctest::Approx(20.20288926663709).epsilon(1e-14));
    for (double d : {1.0, 37.5, 500.0}) {
        const double r = effective_radius_peaceman({d, d, 10.0}, {3.0, 3.0, 1.0}, Axis::Z);
        CHECK(std::abs(r - 0.28 * std::sqrt(2.0) / 2.0 * d) <= 1e-12 * d);
    }
    const double a = effective_radius_peaceman({80.0, 120.0, 10.0}, {300.0, 20.0, 1.0}, Axis::Z);
    const double b = effective_radius_peaceman({120.0, 80.0, 10.0}, {20.0, 300.0, 1.0}, Axis::Z);
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
    // x-directed well uses the y and z axes
    const double x = effective_radius_peaceman({999.0, 60.0, 60.0}, {1.0, 7.0, 7.0}, Axis::X);
    CHECK(x == doctest::Approx(0.28 * std::sqrt(2.0) * 60.0 / 2.0).epsilon(1e-14));
}

TEST_CASE("well index")
{
    CHECK(well_index(100.0, 1.0, std::exp(1.0) * 0.25, 0.25, 0.0) == doctest::Approx(2.0 * pi * 100.0).epsilon(1e-15));
    CHECK(well_index(100.0, 1.0, 20.20, 0.25, 0.0) == doctest::Approx(2.0 * pi * 100.0 / std::log(80.8)).epsilon(1e-14));
    CHECK(well_index(100.0, 1.0, 20.20, 0.25, 0.0) == doctest::Approx(143.06).epsilon(1e-4));
    CHECK(well_index(100.0, 0.5, 20.20, 0.25, 2.0) == doctest::Approx(pi * 100.0 / (std::log(80.8) + 2.0)));
}

TEST_CASE("make_well resolves geometry")
{
    CellProps p = testing::uniform_props(100.0, 0.05, 10.0, 0.2);
    const Grid g = build_grid(testing::dims(3, 3, 2, 102.04, 102.04, 1.0, 1000.0), p);
    WellSpec s;
    s.name = "P";
    s.perforations.push_back({g.index(1, 1, 0), std::nullopt, {}});
    s.perforations.push_back({g.index(1, 1, 1), 77.0, {}});
    const Well w = make_well(s, g);
    // k*h = 100 mD * 1 ft, Peaceman radius of the isotropic block
    CHECK(w.wi[0] == doctest::Approx(2.0 * pi * 100.0 / std::log(20.20288926663709 / 0.25)).epsilon(1e-13));
    CHECK(w.wi[1] == 77.0);
    CHECK(w.ref_depth == doctest::Approx(1000.5));
    CHECK(w.perf_depth[1] == doctest::Approx(1001.5));

    WellSpec bad = s;
    bad.perforations[0].cell = 99;
    CHECK_THROWS(make_well(bad, g));
    bad = s;
    bad.perforations.clear();
    CHECK_THROWS(make_well(bad, g));
}

TEST_CASE("perforation pressure")
{
    CHECK(perforation_pressure(3000.0, 2000.0, 2000.0, 62.4) == 3000.0);
    CHECK(perforation_pressure(3000.0, 2000.0, 2100.0, 62.4) - 3000.0 == doctest::Approx(43.3333333333).epsilon(1e-10));
    CHECK(perforation_pressure(3000.0, 2000.0, 1900.0, 62.4) - 3000.0 == doctest::Approx(-62.4 / 144.0 * 100.0));
}

TEST_CASE("perforation rates")
{
    const auto fluid = unit_fluid();
    const auto table = flat_table();
    SUBCASE("no drawdown")
    {
        const auto r = perforation_rate({2000.0, 0.4}, 2000.0, 1.0, 200.0, WellKind::Producer, fluid, table);
        CHECK(r.mass[Oil] == 0.0);
        CHECK(r.mass[Water] == 0.0);
    }
    SUBCASE("producer is a sink")
    {
        const auto r = perforation_rate({2000.0, 0.4}, 1900.0, 1.0, 200.0, WellKind::Producer, fluid, table);
        CHECK(r.mass[Oil] < 0.0);
        CHECK(r.mass[Water] < 0.0);
        // lambda = 1/cp: q = 0.001127 * 200 * 100 bbl/day
        CHECK(r.reservoir_rate[Oil] == doctest::Approx(-22.54).epsilon(1e-14));
        CHECK(r.reservoir_rate[Water] == doctest::Approx(-22.54).epsilon(1e-14));
        CHECK(r.mass[Oil] == doctest::Approx(-22.54 * 5.614583 * 50.0).epsilon(1e-14));
        CHECK(surface_rate(r.mass[Oil], fluid.oil) == doctest::Approx(-22.54).epsilon(1e-14));
    }
    SUBCASE("injector uses end-point water mobility")
    {
        const SatFuncTable t({{0.1, 0.0, 1.0, 0.0}, {0.7, 0.6, 0.0, 0.0}});
        const auto r = perforation_rate({2000.0, 0.1}, 2100.0, 1.0, 200.0, WellKind::Injector, fluid, t);
        CHECK(r.mass[Oil] == 0.0);
        CHECK(r.reservoir_rate[Water] == doctest::Approx(0.001127 * 200.0 * 0.6 * 100.0));
        const auto z = perforation_rate({2000.0, 0.1}, 2000.0, 1.0, 200.0, WellKind::Injector, fluid, t);
        CHECK(z.mass[Water] == 0.0);
        CHECK(z.dmass[Water][2] > 0.0);
    }
}

TEST_CASE("perforation rate derivatives match central differences")
{
    FluidProps fluid;
    fluid.oil = {15.0, 1.036, 1.313e-5, 40.0, 58.0, FvfForm::Exponential};
    fluid.water = {15.0, 1.0, 3e-6, 1.0, 62.4, FvfForm::Exponential};
    CoreyParams cp;
    cp.swc = 0.08;
    cp.sor = 0.2;
    cp.pc_max = 10.0;
    const auto table = corey_table(cp);
    const double wi = 143.0, dpp = 1.0;
    for (WellKind kind : {WellKind::Producer, WellKind::Injector}) {
        const double p = 2000.0, s = 0.3123, pbh = kind == WellKind::Producer ? 1800.0 : 2300.0;
        const auto r = perforation_rate({p, s}, pbh, dpp, wi, kind, fluid, table);
        for (int ph : {0, 1}) {
            const double hp = 1e-2, hs = 1e-6;
            auto at = [&](double pp, double ss, double bb) {
                return perforation_rate({pp, ss}, bb, dpp, wi, kind, fluid, table).mass[ph];
            };
            const double d_p = (at(p + hp, s, pbh) - at(p - hp, s, pbh)) / (2 * hp);
            const double d_s = (at(p, s + hs, pbh) - at(p, s - hs, pbh)) / (2 * hs);
            const double d_b = (at(p, s, pbh + hp) - at(p, s, pbh - hp)) / (2 * hp);
            CHECK(r.dmass[ph][0] == doctest::Approx(d_p).epsilon(1e-6));
            CHECK(r.dmass[ph][1] == doctest::Approx(d_s).epsilon(1e-6));
            CHECK(r.dmass[ph][2] == doctest::Approx(d_b).epsilon(1e-6));
        }
    }
}

TEST_CASE("well equations")
{
    const auto fluid = unit_fluid();
    const auto table = flat_table();
    Well w;
    w.spec.name = "P";
    w.spec.kind = WellKind::Producer;
    w.wi = {200.0};
    const std::vector<PerfRates> perfs{
        perforation_rate({2000.0, 0.4}, 1900.0, 1.0, 200.0, WellKind::Producer, fluid, table)};

    const auto bhp = well_equation(w, WellControl::Bhp, 1234.5, 300.0, 1000.0, perfs, fluid);
    CHECK(bhp.residual == 234.5);
    CHECK(bhp.d_pbh == 1.0);
    CHECK(bhp.d_cell[0][0] == 0.0);
    CHECK(bhp.d_cell[0][1] == 0.0);

    const auto rate = well_equation(w, WellControl::Rate, 1900.0, 20.0, 1000.0, perfs, fluid);
    CHECK(rate.residual == doctest::Approx(22.54 - 20.0).epsilon(1e-13));
    CHECK(rate.d_pbh < 0.0);  // raising p_bh lowers production
}
