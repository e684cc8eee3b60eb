#include "dpsim/props.hpp"

#include <doctest.h>

#include <cmath>

using namespace dpsim;

namespace {

PhasePvt oil_ex1()
{
    PhasePvt o;
    o.p_ref = 15.0;
    o.b_ref = 1.036;
    o.compressibility = 1.313e-5;
    o.viscosity = 40.0;
    o.rho_sc = 58.0;
    return o;
}

}  // namespace

TEST_CASE("oil density, incompressible limit")
{
    auto o = oil_ex1();
    o.compressibility = 0.0;
    for (double p : {15.0, 500.0, 2000.0, 9000.0})
        CHECK(phase_density(p, o).value == doctest::Approx(58.0 / 1.036).epsilon(1e-15));
}

TEST_CASE("oil density at 2000 psi")
{
    // rho_sc / (B_ref * exp(-c * 1985))
    const double expected = 57.46286520849137;
    const auto r = oil_density(2000.0, oil_ex1());
    CHECK(r.value == doctest::Approx(expected).epsilon(1e-13));
    CHECK(r.deriv == doctest::Approx(expected * 1.313e-5).epsilon(1e-12));
    CHECK(oil_density(15.0, oil_ex1()).value == doctest::Approx(55.98455598455598).epsilon(1e-14));
}

TEST_CASE("linear formation volume factor")
{
    auto o = oil_ex1();
    o.form = FvfForm::Linear;
    const auto b = formation_volume_factor(1015.0, o);
    CHECK(b.value == doctest::Approx(1.036 * (1.0 - 1.313e-5 * 1000.0)));
    CHECK(b.deriv == doctest::Approx(-1.036 * 1.313e-5));
}

TEST_CASE("water density derivative matches central difference")
{
    PhasePvt w;
    w.p_ref = 15.0;
    w.compressibility = 3e-6;
    w.rho_sc = 62.4;
    SUBCASE("compressible")
    {
        for (double p : {100.0, 2000.0, 6000.0}) {
            const double h = 1e-3;
            const double fd = (water_density(p + h, w).value - water_density(p - h, w).value) / (2 * h);
            const auto r = water_density(p, w);
            CHECK(std::abs(r.deriv - fd) / std::abs(r.deriv) < 1e-6);
            CHECK(r.deriv == doctest::Approx(r.value * 3e-6).epsilon(1e-14));
        }
    }
    SUBCASE("incompressible")
    {
        w.compressibility = 0.0;
        CHECK(water_density(100.0, w).value == water_density(5000.0, w).value);
        CHECK(water_density(100.0, w).deriv == 0.0);
    }
}

TEST_CASE("porosity")
{
    CHECK(porosity(15.0, {0.1392, 3e-6, 15.0}).value == 0.1392);
    CHECK(porosity(4000.0, {0.1392, 0.0, 15.0}).value == 0.1392);
    const auto p = porosity(2015.0, {0.039585, 3e-6, 15.0});
    CHECK(p.value == doctest::Approx(0.039585 * (1.0 + 3e-6 * 2000.0)).epsilon(1e-15));
    CHECK(p.value == doctest::Approx(0.03982251).epsilon(1e-12));
    CHECK(p.deriv == doctest::Approx(0.039585 * 3e-6));
    CHECK_FALSE(p.clamped);

    const auto low = porosity(-1e6, {0.1, 1e-5, 15.0});
    CHECK(low.clamped);
    CHECK(low.value > 0.0);
    CHECK(low.deriv == 0.0);
    const auto high = porosity(1e7, {0.5, 1e-4, 15.0});
    CHECK(high.clamped);
    CHECK(high.value == 1.0);
}

TEST_CASE("saturation table interpolation")
{
    const SatFuncTable t({{0.2, 0.0, 0.9, 5.0}, {0.8, 0.6, 0.0, 0.0}});
    const auto a = t.evaluate(0.2);
    CHECK(a.k_rw == 0.0);
    CHECK(a.k_ro == 0.9);
    CHECK(a.p_cow == 5.0);

    const auto m = t.evaluate(0.5);
    CHECK(m.k_rw == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(m.k_ro == doctest::Approx(0.45).epsilon(1e-14));
    CHECK(m.p_cow == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(m.dk_rw == doctest::Approx(1.0));
    CHECK(m.dk_ro == doctest::Approx(-1.5));
    CHECK(m.dp_cow == doctest::Approx(-25.0 / 3.0));

    const auto c = t.evaluate(0.9);
    CHECK(c.k_rw == 0.6);
    CHECK(c.k_ro == 0.0);
    CHECK(c.p_cow == 0.0);
    CHECK(c.dk_rw == 0.0);
    CHECK(c.dk_ro == 0.0);
    CHECK(c.dp_cow == 0.0);
    CHECK(t.evaluate(0.0).k_ro == 0.9);
}

TEST_CASE("saturation table rejects bad rows")
{
    CHECK_THROWS(SatFuncTable({{0.5, 0.0, 0.9, 5.0}, {0.2, 0.6, 0.0, 0.0}}));
    CHECK_THROWS(SatFuncTable({{0.2, -0.1, 0.9, 5.0}, {0.8, 0.6, 0.0, 0.0}}));
}

TEST_CASE("corey table end points")
{
    CoreyParams c;
    c.swc = 0.1;
    c.sor = 0.2;
    c.krw_max = 0.7;
    c.kro_max = 0.95;
    c.pc_max = 8.0;
    const auto t = corey_table(c);
    CHECK(t.rows().size() == 21);
    CHECK(t.s_min() == doctest::Approx(0.1));
    CHECK(t.s_max() == doctest::Approx(0.8));
    CHECK(t.evaluate(0.1).k_rw == 0.0);
    CHECK(t.evaluate(0.1).k_ro == doctest::Approx(0.95));
    CHECK(t.evaluate(0.1).p_cow == doctest::Approx(8.0));
    CHECK(t.evaluate(0.8).k_rw == doctest::Approx(0.7));
    CHECK(t.evaluate(0.8).k_ro == doctest::Approx(0.0));
    CHECK(t.krw_endpoint() == doctest::Approx(0.7));
    // on a node: (s* = 0.5)^2
    CHECK(t.evaluate(0.45).k_rw == doctest::Approx(0.7 * 0.25));
}
