#include "dpsim/simulator.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace dpsim {

std::unique_ptr<FlowModel> make_model(const SimDeck& deck, const Grid& grid)
{
    ModelInputs in;
    in.grid = &grid;
    in.fluid = deck.fluid;
    in.frac_table = deck.frac_table;
    in.matrix_table = deck.matrix_table;
    in.wells = build_deck_wells(deck, grid);
    in.options = deck.assembly;
    if (deck.model == ModelKind::Single)
        return std::make_unique<SinglePorosityModel>(std::move(in));
    return std::make_unique<DualPorosityModel>(std::move(in));
}

Simulator::Simulator(SimDeck deck, int threads)
    : deck_(std::move(deck)), pool_(threads), grid_(std::make_unique<Grid>(build_deck_grid(deck_))),
      model_(make_model(deck_, *grid_)), newton_(deck_.newton), controller_(deck_.timestep)
{
    newton_.linear.cpr.pressure_indices = model_->pressure_indices();
    state_ = initialize(deck_, &deck_.log);
    for (const auto& w : deck_.wells)
        controls_.push_back({w.initial_control, w.max_rate, w.bhp_limit});
    totals_.wells.resize(deck_.wells.size());
}

void Simulator::set_linear_system_observer(std::function<void(int, int, const LinearSystem&)> fn)
{
    on_system_ = std::move(fn);
}

void Simulator::apply_events(double t)
{
    while (next_event_ < deck_.events.size() && deck_.events[next_event_].time <= t) {
        const auto& ev = deck_.events[next_event_++];
        auto& c = controls_[ev.well];
        switch (ev.kind) {
        case ScheduleEvent::Kind::RateMax: c.max_rate = ev.value; break;
        case ScheduleEvent::Kind::BhpLimit: c.bhp_limit = ev.value; break;
        case ScheduleEvent::Kind::Control: c.control = ev.control; break;
        }
    }
}

std::vector<double> Simulator::stops() const
{
    std::vector<double> s = deck_.report_times;
    for (const auto& ev : deck_.events)
        s.push_back(ev.time);
    s.push_back(deck_.end_time);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

bool Simulator::check_constraints(const State& x, std::vector<WellControlState>& ctl) const
{
    const auto rates = model_->well_rates(x);
    bool switched = false;
    for (std::size_t w = 0; w < ctl.size(); ++w) {
        const bool inj = deck_.wells[w].kind == WellKind::Injector;
        auto& c = ctl[w];
        if (c.control == WellControl::Rate) {
            const bool violated = inj ? x.bhp[w] > c.bhp_limit : x.bhp[w] < c.bhp_limit;
            if (violated) {
                c.control = WellControl::Bhp;
                switched = true;
            }
        } else {
            const double q = inj ? rates[w].water_injected : rates[w].oil;
            if (q > c.max_rate * (1.0 + 1e-9)) {
                c.control = WellControl::Rate;
                switched = true;
            }
        }
    }
    return switched;
}

ReportRow Simulator::make_row(const State& x, const State& prev, double dt)
{
    const auto rates = model_->well_rates(x);
    ReportRow row;
    row.time = time_;
    PhasePair q{0.0, 0.0};
    for (std::size_t w = 0; w < rates.size(); ++w) {
        const auto& r = rates[w];
        const bool inj = deck_.wells[w].kind == WellKind::Injector;
        WellReport wr;
        wr.bhp = x.bhp[w];
        wr.control = controls_[w].control;
        if (inj) {
            wr.oil_rate = -r.oil;
            wr.water_rate = r.water_injected;
            wr.water_rate_rb = r.water_injected_rb;
            totals_.cum_water_injected += dt * std::max(wr.water_rate, 0.0);
        } else {
            wr.oil_rate = r.oil;
            wr.water_rate = r.water;
            wr.water_rate_rb = 0.0;
            totals_.cum_oil_produced += dt * std::max(wr.oil_rate, 0.0);
            totals_.cum_water_produced += dt * std::max(wr.water_rate, 0.0);
        }
        q[Oil] += r.mass[Oil];
        q[Water] += r.mass[Water];
        row.wells.push_back(wr);
    }
    // water produced at reservoir conditions for producers
    const auto perfs = model_->perforation_rates(x);
    for (std::size_t w = 0; w < rates.size(); ++w)
        if (deck_.wells[w].kind == WellKind::Producer)
            for (const auto& pr : perfs[w])
                row.wells[w].water_rate_rb -= pr.reservoir_rate[Water];

    const auto m_new = model_->mass_in_place(x);
    const auto m_old = model_->mass_in_place(prev);
    for (int a = 0; a < 2; ++a) {
        const double defect = (m_new[a] - m_old[a]) - dt * q[a];
        const double denom = m_new[a] > 0.0 ? m_new[a] : m_new[0] + m_new[1];
        row.mb_error[a] = denom > 0.0 ? std::abs(defect) / denom : std::abs(defect);
    }
    row.cum_oil_produced = totals_.cum_oil_produced;
    row.cum_water_produced = totals_.cum_water_produced;
    row.cum_water_injected = totals_.cum_water_injected;
    return row;
}

const RunSummary& Simulator::run(std::optional<double> stop_at)
{
    const auto t0 = std::chrono::steady_clock::now();
    const double end = std::min(stop_at.value_or(deck_.end_time), deck_.end_time);
    auto s = stops();
    if (stop_at && *stop_at < deck_.end_time)
        s.push_back(*stop_at);
    std::sort(s.begin(), s.end());
    apply_events(time_);

    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    const double wall_before = summary_.wall_seconds;

    while (time_ < end) {
        const double stop = *std::upper_bound(s.begin(), s.end(), time_);
        double dt = controller_.propose(time_, stop);
        model_->update_well_densities(state_);

        std::vector<WellControlState> ctl = controls_;
        State guess = state_;
        int switches = 0;
        long step_newton = 0, step_linear = 0;
        NewtonResult res;
        NewtonConfig cfg = newton_;
        const int attempt = step_ + 1;
        if (on_system_)
            cfg.on_linear_system = [&](int it, const LinearSystem& sys) { on_system_(attempt, it, sys); };

        for (;;) {
            res = solve_timestep(pool_, *model_, state_, guess, dt, ctl, cfg);
            step_newton += res.report.iterations;
            step_linear += res.report.linear_total();
            bool failed = !res.report.converged();
            std::string why = res.report.failure_reason;
            if (!failed && check_constraints(res.state, ctl)) {
                ++summary_.switches;
                if (++switches <= 3) {
                    guess = res.state;
                    continue;
                }
                failed = true;
                why = "more than 3 constraint switches";
            }
            if (!failed)
                break;
            ++summary_.cuts;
            if (!controller_.cut(dt)) {
                summary_.newton_total += step_newton;
                summary_.linear_total += step_linear;
                summary_.failure = "time step underflow at t = " + std::to_string(time_) + " days (" + why + ")";
                summary_.wall_seconds = wall_before + elapsed();
                throw ConvergenceFailure(summary_.failure, res.state, time_);
            }
            dt = controller_.propose(time_, stop);
            dt = std::min(dt, controller_.dt());
            ctl = controls_;
            guess = state_;
            switches = 0;
        }

        const State prev = std::move(state_);
        state_ = std::move(res.state);
        time_ = dt == stop - time_ ? stop : time_ + dt;
        if (stop - time_ < 1e-9 * std::max(1.0, stop))
            time_ = stop;
        controls_ = ctl;
        ++step_;
        controller_.accept(dt);
        summary_.steps = step_;
        summary_.newton_total += step_newton;
        summary_.linear_total += step_linear;
        rows_.push_back(make_row(state_, prev, dt));

        if (on_step_) {
            StepInfo info{step_, time_, dt, &res.report, &state_, &prev, &rows_.back(), step_newton, step_linear};
            on_step_(info);
        }
        apply_events(time_);
    }
    summary_.completed = time_ >= deck_.end_time;
    summary_.wall_seconds = wall_before + elapsed();
    return summary_;
}

namespace {

using nlohmann::json;

json row_to_json(const ReportRow& r)
{
    json wells = json::array();
    for (const auto& w : r.wells)
        wells.push_back({w.oil_rate, w.water_rate, w.water_rate_rb, w.bhp, static_cast<int>(w.control)});
    return {{"time", r.time},
            {"wells", wells},
            {"cum", {r.cum_oil_produced, r.cum_water_produced, r.cum_water_injected}},
            {"mb", {r.mb_error[0], r.mb_error[1]}}};
}

ReportRow row_from_json(const json& j)
{
    ReportRow r;
    r.time = j.at("time").get<double>();
    for (const auto& w : j.at("wells"))
        r.wells.push_back({w[0].get<double>(), w[1].get<double>(), w[2].get<double>(), w[3].get<double>(),
                           static_cast<WellControl>(w[4].get<int>())});
    const auto& c = j.at("cum");
    r.cum_oil_produced = c[0].get<double>();
    r.cum_water_produced = c[1].get<double>();
    r.cum_water_injected = c[2].get<double>();
    r.mb_error = {j.at("mb")[0].get<double>(), j.at("mb")[1].get<double>()};
    return r;
}

}  // namespace

std::string Simulator::checkpoint() const
{
    json ctl = json::array();
    for (const auto& c : controls_)
        ctl.push_back({static_cast<int>(c.control), c.max_rate, c.bhp_limit});
    json rows = json::array();
    for (const auto& r : rows_)
        rows.push_back(row_to_json(r));
    json j{{"format", "dpsim-checkpoint-1"},
           {"deck", deck_.source},
           {"time", time_},
           {"step", step_},
           {"next_event", next_event_},
           {"controller", {{"dt", controller_.dt()}, {"cuts", controller_.consecutive_cuts()}}},
           {"cells", state_.cells},
           {"bhp", state_.bhp},
           {"controls", ctl},
           {"totals", {totals_.cum_oil_produced, totals_.cum_water_produced, totals_.cum_water_injected}},
           {"summary",
            {{"newton_total", summary_.newton_total},
             {"linear_total", summary_.linear_total},
             {"cuts", summary_.cuts},
             {"switches", summary_.switches},
             {"wall_seconds", summary_.wall_seconds}}},
           {"rows", rows}};
    return j.dump(1);
}

void Simulator::restore(const std::string& text)
{
    const json j = json::parse(text);
    if (j.value("format", "") != "dpsim-checkpoint-1")
        throw std::runtime_error("not a checkpoint file");
    auto cells = j.at("cells").get<std::vector<double>>();
    auto bhp = j.at("bhp").get<std::vector<double>>();
    if (cells.size() != state_.cells.size() || bhp.size() != state_.bhp.size())
        throw std::runtime_error("checkpoint does not match the deck's grid or wells");
    state_.cells = std::move(cells);
    state_.bhp = std::move(bhp);
    time_ = j.at("time").get<double>();
    step_ = j.at("step").get<int>();
    next_event_ = j.at("next_event").get<std::size_t>();
    controller_.restore(j.at("controller").at("dt").get<double>(), j.at("controller").at("cuts").get<int>());
    const auto& ctl = j.at("controls");
    for (std::size_t w = 0; w < controls_.size(); ++w)
        controls_[w] = {static_cast<WellControl>(ctl[w][0].get<int>()), ctl[w][1].get<double>(),
                        ctl[w][2].get<double>()};
    const auto& t = j.at("totals");
    totals_.cum_oil_produced = t[0].get<double>();
    totals_.cum_water_produced = t[1].get<double>();
    totals_.cum_water_injected = t[2].get<double>();
    const auto& s = j.at("summary");
    summary_.steps = step_;
    summary_.newton_total = s.at("newton_total").get<long>();
    summary_.linear_total = s.at("linear_total").get<long>();
    summary_.cuts = s.at("cuts").get<int>();
    summary_.switches = s.at("switches").get<int>();
    summary_.wall_seconds = s.at("wall_seconds").get<double>();
    rows_.clear();
    for (const auto& r : j.at("rows"))
        rows_.push_back(row_from_json(r));
}

}  // namespace dpsim
