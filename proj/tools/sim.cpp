#include "dpsim/deck.hpp"
#include "dpsim/decouple.hpp"
#include "dpsim/output.hpp"
#include "dpsim/simulator.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace dpsim;

namespace {

constexpr const char* kVersion = "0.9.0";

ForcingRule parse_forcing(const std::string& s)
{
    if (s == "ew1")
        return ForcingRule::ew1();
    if (s == "ew2")
        return ForcingRule::ew2();
    if (s == "ew3")
        return ForcingRule::ew3();
    if (s.rfind("const:", 0) == 0) {
        const double v = std::stod(s.substr(6));
        if (!(v > 0.0 && v < 1.0))
            throw CLI::ValidationError("--forcing", "constant forcing must be in (0,1)");
        return ForcingRule::constant(v);
    }
    throw CLI::ValidationError("--forcing", "expected ew1, ew2, ew3 or const:VALUE");
}

int parse_every(const std::string& s)
{
    const std::string key = "every=";
    if (s.rfind(key, 0) != 0)
        throw CLI::ValidationError("--snapshots", "expected every=K");
    const int k = std::stoi(s.substr(key.size()));
    if (k < 1)
        throw CLI::ValidationError("--snapshots", "K must be positive");
    return k;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p);
    if (!in)
        throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunOptions {
    std::string deck;
    int threads = 1;
    std::string out = "out";
    std::string snapshots;
    std::string forcing;
    bool dump = false;
    double checkpoint_at = -1.0;
    double stop_at = -1.0;
    std::string restart;
};

int cmd_check(const std::string& path)
{
    try {
        const SimDeck deck = parse_deck(path);
        Simulator sim(deck, 1);
        for (const auto& msg : sim.deck().log)
            std::cerr << "note: " << msg << '\n';
        std::cout << path << ": ok (" << deck.dims.nx << "x" << deck.dims.ny << "x" << deck.dims.nz << ", "
                  << deck.wells.size() << " wells, " << deck.end_time << " days)\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

int cmd_run(const RunOptions& o)
{
    std::unique_ptr<Simulator> sim;
    int snap_every = 0;
    try {
        SimDeck deck = parse_deck(o.deck);
        if (!o.forcing.empty())
            deck.newton.forcing = parse_forcing(o.forcing);
        snap_every = o.snapshots.empty() ? deck.snapshot_every : parse_every(o.snapshots);
        sim = std::make_unique<Simulator>(std::move(deck), o.threads);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    for (const auto& msg : sim->deck().log)
        std::cerr << "note: " << msg << '\n';

    const fs::path out = o.out;
    try {
        ensure_writable_dir(out);
        if (snap_every > 0)
            ensure_writable_dir(out / "snapshots");
        if (o.dump)
            ensure_writable_dir(out / "linear_systems");
        if (!o.restart.empty())
            sim->restore(read_file(o.restart));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    char name[64];
    if (snap_every > 0 && sim->rows().empty()) {
        std::snprintf(name, sizeof name, "step_%05d.vtk", 0);
        write_snapshot(out / "snapshots" / name, sim->grid(), sim->state(), sim->time());
    }
    sim->set_step_observer([&](const StepInfo& s) {
        std::fprintf(stderr, "step %4d  t = %9.4f d  dt = %8.4f d  newton %2ld  linear %4ld\n", s.step, s.time, s.dt,
                     s.newton_iterations, s.linear_iterations);
        if (snap_every > 0 && s.step % snap_every == 0) {
            std::snprintf(name, sizeof name, "step_%05d.vtk", s.step);
            write_snapshot(out / "snapshots" / name, sim->grid(), *s.state, s.time);
        }
    });
    if (o.dump)
        sim->set_linear_system_observer([&](int step, int it, const LinearSystem& sys) {
            char m[64], r[64];
            std::snprintf(m, sizeof m, "step%05d_newton%02d.mtx", step, it);
            std::snprintf(r, sizeof r, "step%05d_newton%02d_rhs.mtx", step, it);
            write_linear_system(out / "linear_systems" / m, out / "linear_systems" / r, sys);
        });

    const auto& wells = sim->deck().wells;
    auto write_all = [&] {
        write_wells_csv(out / "wells.csv", wells, sim->rows());
        write_summary(out / "summary.txt", sim->summary(), sim->deck().source, o.threads);
        write_plot_script(out / "plot_wells.py", wells);
    };

    try {
        if (o.checkpoint_at >= 0.0 && o.checkpoint_at > sim->time()) {
            sim->run(o.checkpoint_at);
            std::ofstream(out / "checkpoint.json") << sim->checkpoint();
            std::cerr << "checkpoint written at t = " << sim->time() << " d\n";
        }
        if (o.stop_at >= 0.0)
            sim->run(o.stop_at);
        else
            sim->run();
    } catch (const ConvergenceFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        write_all();
        write_snapshot(out / "failure_state.vtk", sim->grid(), e.state(), e.time());
        std::cerr << "failing state written to " << (out / "failure_state.vtk").string() << '\n';
        return 3;
    } catch (const SingularBlockError& e) {
        std::cerr << "error: " << e.what() << '\n';
        write_all();
        return 3;
    }
    write_all();
    const auto& s = sim->summary();
    std::cout << "time steps " << s.steps << ", newton " << s.newton_total << ", linear " << s.linear_total
              << ", wall " << s.wall_seconds << " s\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-phase dual-porosity reservoir simulator"};
    app.require_subcommand(1);

    RunOptions ro;
    auto* run = app.add_subcommand("run", "run a deck");
    run->add_option("deck", ro.deck, "deck file")->required();
    run->add_option("--threads", ro.threads, "worker threads")->check(CLI::Range(1, 256));
    run->add_option("--out", ro.out, "output directory");
    run->add_option("--snapshots", ro.snapshots, "write a grid snapshot every K steps (every=K)");
    run->add_option("--forcing", ro.forcing, "Newton forcing: ew1, ew2, ew3 or const:VALUE");
    run->add_flag("--dump-linear-systems", ro.dump, "write every Newton system in Matrix Market form");
    run->add_option("--checkpoint-at", ro.checkpoint_at, "write out/checkpoint.json at this time (day)");
    run->add_option("--stop-at", ro.stop_at, "stop at this time (day)");
    run->add_option("--restart", ro.restart, "continue from a checkpoint file");

    std::string check_path;
    auto* check = app.add_subcommand("check", "parse and validate a deck");
    check->add_option("deck", check_path, "deck file")->required();

    app.add_subcommand("version", "print the version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (run->parsed())
        return cmd_run(ro);
    if (check->parsed())
        return cmd_check(check_path);
    std::cout << "sim " << kVersion << '\n';
    return 0;
}
