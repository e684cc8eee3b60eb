#include "dpsim/deck.hpp"
#include "dpsim/newton.hpp"
#include "dpsim/parallel.hpp"
#include "dpsim/simulator.hpp"
#include "dpsim/timestep.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace dpsim;

TEST_CASE("forcing rules")
{
    ForcingInputs in;
    in.norm_b_prev = 1.0;
    in.norm_b = 0.5;
    CHECK(forcing_term(ForcingRule::ew3(1.0, 2.0), in) == doctest::Approx(0.25));
    in.norm_b = 1.0;
    CHECK(forcing_term(ForcingRule::ew3(0.9, 2.0), in) == doctest::Approx(0.9));
    in.norm_b = 3.0;
    CHECK(forcing_term(ForcingRule::ew3(0.9, 2.0), in) == 0.9);

    ForcingInputs e2;
    e2.norm_b = 10.0;
    e2.norm_r_prev = 9.0;
    e2.norm_b_prev = 100.0;
    CHECK(forcing_term(ForcingRule::ew2(), e2) == doctest::Approx(0.01));
    e2.norm_b = 8.0;  // printed form would be negative
    CHECK(forcing_term(ForcingRule::ew2(), e2) == doctest::Approx(0.01));
    e2.norm_b = 9.0;
    CHECK(forcing_term(ForcingRule::ew2(), e2) == 1e-4);

    ForcingInputs e1;
    e1.norm_b_prev = 4.0;
    e1.norm_b_minus_r = 1.0;
    CHECK(forcing_term(ForcingRule::ew1(), e1) == doctest::Approx(0.25));

    ForcingInputs zero;
    CHECK(forcing_term(ForcingRule::ew3(), zero, 1e-4, 0.9) == 1e-4);
    CHECK(forcing_term(ForcingRule::constant(1e-8), zero) == 1e-8);
    CHECK(forcing_term(ForcingRule::constant(0.5), in) == 0.5);
}

TEST_CASE("forcing stays inside its bounds")
{
    for (double nb : {1e-12, 1e-3, 0.5, 1.0, 7.0, 1e6})
        for (double nr : {0.0, 0.3, 2.0, 1e5})
            for (const auto& rule : {ForcingRule::ew1(), ForcingRule::ew2(), ForcingRule::ew3(0.7, 1.5)}) {
                ForcingInputs in{nb, 1.0, nr, std::abs(nb - nr)};
                const double eta = forcing_term(rule, in, 1e-4, 0.9);
                CHECK(eta >= 1e-4);
                CHECK(eta <= 0.9);
            }
}

TEST_CASE("time step controller")
{
    TimestepController c;
    CHECK(c.dt() == 1.0);
    CHECK(c.propose(0.0, 10.0) == 1.0);
    c.accept(1.0);
    CHECK(c.dt() == 2.0);
    for (int i = 0; i < 10; ++i)
        c.accept(c.dt());
    CHECK(c.dt() == 50.0);
    // lands exactly on the stop
    CHECK(c.propose(0.0, 30.0) == 30.0);
    // no sliver below dt_min in front of the stop
    CHECK(c.propose(0.0, 50.005) == doctest::Approx(25.0025));
    CHECK(c.cut(40.0));
    CHECK(c.dt() == 20.0);
    CHECK(c.consecutive_cuts() == 1);
    c.accept(20.0);
    CHECK(c.consecutive_cuts() == 0);

    TimestepController d;
    int ok = 0;
    while (d.cut(d.dt()))
        ++ok;
    CHECK(ok == 6);  // 1 -> 0.5 -> ... -> 0.015625, the next halving drops below 0.01

    TimestepControls many;
    many.dt_init = 50.0;
    many.dt_min = 1e-9;
    many.max_cuts = 3;
    TimestepController e(many);
    CHECK(e.cut(50.0));
    CHECK(e.cut(e.dt()));
    CHECK(e.cut(e.dt()));
    CHECK_FALSE(e.cut(e.dt()));

    TimestepControls bad;
    bad.dt_min = 2.0;
    CHECK_THROWS(TimestepController{bad});
}

namespace {

struct Problem {
    SimDeck deck;
    Grid grid;
    std::unique_ptr<FlowModel> model;
    State x0;
    std::vector<WellControlState> ctl;
    explicit Problem(const std::string& name)
        : deck(parse_deck(testing::deck_path(name))), grid(build_deck_grid(deck)), model(make_model(deck, grid)),
          x0(initialize(deck))
    {
        for (const auto& w : deck.wells)
            ctl.push_back({w.initial_control, w.max_rate, w.bhp_limit});
        model->update_well_densities(x0);
    }
    NewtonConfig config() const
    {
        NewtonConfig c = deck.newton;
        c.linear.cpr.pressure_indices = model->pressure_indices();
        return c;
    }
};

}  // namespace

TEST_CASE("affine problem converges in one Newton iteration")
{
    Problem p("affine_cell.deck");
    WorkerPool pool(1);
    auto cfg = p.config();
    cfg.forcing = ForcingRule::constant(1e-8);
    const auto r = solve_timestep(pool, *p.model, p.x0, p.x0, 1.0, p.ctl, cfg);
    CHECK(r.report.converged());
    CHECK(r.report.iterations == 1);
    CHECK(r.report.forcing.front() == 1e-8);
}

TEST_CASE("converged state takes zero iterations")
{
    Problem p("affine_cell.deck");
    WorkerPool pool(1);
    auto cfg = p.config();
    const auto first = solve_timestep(pool, *p.model, p.x0, p.x0, 1.0, p.ctl, cfg);
    REQUIRE(first.report.converged());
    cfg.epsilon = 1e-3;
    cfg.mb_tol = 1e-6;
    const auto again = solve_timestep(pool, *p.model, p.x0, first.state, 1.0, p.ctl, cfg);
    CHECK(again.report.converged());
    CHECK(again.report.iterations == 0);
}

TEST_CASE("Newton on the 3x3 deck: bookkeeping, bounds and fast local convergence")
{
    Problem p("jacobian_3x3.deck");
    WorkerPool pool(1);
    auto cfg = p.config();
    cfg.forcing = ForcingRule::constant(1e-8);
    cfg.epsilon = 1e-11;
    cfg.mb_tol = 1e-14;
    const auto r = solve_timestep(pool, *p.model, p.x0, p.x0, 5.0, p.ctl, cfg);
    REQUIRE(r.report.converged());
    const auto& rep = r.report;
    CHECK(rep.linear_total() ==
          std::accumulate(rep.linear_iterations.begin(), rep.linear_iterations.end(), 0));
    CHECK(rep.residual_history.size() == static_cast<std::size_t>(rep.iterations) + 1);
    for (std::size_t c = 0; c < p.grid.num_cells(); ++c) {
        CHECK(r.state.s_wf(c) >= 0.0);
        CHECK(r.state.s_wf(c) <= 1.0);
        CHECK(r.state.s_wm(c) >= 0.0);
        CHECK(r.state.s_wm(c) <= 1.0);
    }
    // quadratic tail: ||b_{l+1}|| / ||b_l||^2 stays bounded
    const auto& h = rep.residual_history;
    REQUIRE(h.size() >= 3);
    for (std::size_t l = h.size() >= 4 ? h.size() - 4 : 0; l + 1 < h.size(); ++l) {
        INFO("iteration " << l << ": " << h[l] << " -> " << h[l + 1]);
        CHECK(h[l + 1] < h[l]);
        if (h[l + 1] > 1e-12)
            CHECK(h[l + 1] / (h[l] * h[l]) < 1e3);
    }
}

TEST_CASE("EW3 forcing on the first step of Example 1")
{
    Problem p("ex1.deck");
    WorkerPool pool(1);
    const auto cfg = p.config();
    const auto r = solve_timestep(pool, *p.model, p.x0, p.x0, 1.0, p.ctl, cfg);
    CHECK(r.report.converged());
    CHECK(r.report.iterations <= cfg.max_iters);
    for (double eta : r.report.forcing) {
        CHECK(eta >= 1e-4);
        CHECK(eta <= 0.9);
    }
    for (std::size_t l = 1; l < r.report.residual_history.size(); ++l)
        CHECK(r.report.residual_history[l] < r.report.residual_history[l - 1]);
}
