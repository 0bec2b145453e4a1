#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "optosync/version.hpp"
#include "../src/cli/config.hpp"
#include "../src/cli/output.hpp"

namespace {

using namespace optosync;
using namespace optosync::cli;
namespace fs = std::filesystem;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::string quantum_override;  // "", "on", "off"
    long seed = 0;
    long threads = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path,
                    "INI config file; built-in defaults when omitted");
    cmd->add_option("--out", args.out_dir, "output directory (created if missing)")
        ->capture_default_str();
    cmd->add_option("--quantum", args.quantum_override,
                    "override the config's quantum switch")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--seed", args.seed,
                    "recorded in the manifest; the dynamics itself is deterministic");
    cmd->add_option("--threads", args.threads, "worker threads for sweeps (0 = all cores)");
}

RunConfig load_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) cfg = parse_config_file(args.config_path);
    if (args.quantum_override == "on") cfg.quantum = true;
    if (args.quantum_override == "off") cfg.quantum = false;
    if (args.threads >= 0) cfg.threads = static_cast<unsigned>(args.threads);
    return cfg;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_manifest(const fs::path& dir, const RunConfig& cfg, const std::string& command,
                    const CommonArgs& args, double wall_seconds) {
    write_atomic(dir / "manifest.ini",
                 render_manifest(cfg, command, args.config_path, wall_seconds, args.seed));
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

int cmd_simulate(const CommonArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load_config(args);
    OutputSet outputs;
    outputs.variance = outputs.discord = outputs.negativity = cfg.quantum;

    const fs::path dir(args.out_dir);
    fs::create_directories(dir);

    RunSeries series;
    const PointResult r =
        run_point(cfg.system, cfg.integrator, cfg.analysis, outputs, cfg.init, &series);

    write_atomic(dir / "trajectory.csv", render_trajectory_csv(series, cfg.quantum));
    write_manifest(dir, cfg, "simulate", args, seconds_since(t0));

    const SyncMetrics& m = r.metrics;
    std::cout << "simulate: eta = " << cfg.system.eta << ", quantum = "
              << (cfg.quantum ? "on" : "off") << "\n"
              << "  samples        = " << series.traj.t.size() << " (t_end = "
              << r.diag.t_end_used << (r.diag.t_end_doubled ? ", doubled once" : "")
              << ")\n"
              << "  synchronized   = " << yes_no(m.synchronized) << "\n"
              << "  phi_stat [rad] = " << m.phi_stat << "\n"
              << "  phi_amp  [rad] = " << m.phi_amp << "\n"
              << "  drift    [rad] = " << m.drift << "\n";
    if (cfg.quantum) {
        std::cout << "  var_avg        = " << m.var_avg << "\n"
                  << "  discord_A_avg  = " << m.discord_a_avg << "\n"
                  << "  discord_B_avg  = " << m.discord_b_avg << "\n"
                  << "  E_max          = " << m.e_max << "\n"
                  << "  negativity     = " << yes_no(m.negativity) << "\n";
    }
    std::cout << "wrote " << (dir / "trajectory.csv").string() << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load_config(args);
    if (cfg.values.empty()) {
        throw ConfigError("sweep requires [sweep] values or range");
    }
    const SweepSpec spec = make_sweep_spec(cfg);

    const fs::path dir(args.out_dir);
    fs::create_directories(dir);

    const SweepResult result = run_sweep(spec);

    write_atomic(dir / "sweep.csv", render_sweep_csv(result));
    write_manifest(dir, cfg, "sweep", args, seconds_since(t0));

    std::size_t failed = 0;
    for (const PointResult& r : result.points) {
        if (!r.ok) ++failed;
    }
    std::cout << "sweep: axis = " << axis_name(spec.axis) << ", " << spec.values.size()
              << " points, " << failed << " failed\n";
    for (const PointResult& r : result.points) {
        std::cout << "  " << axis_name(spec.axis) << " = " << r.value
                  << "  sync = " << yes_no(r.metrics.synchronized)
                  << "  phi_stat = " << r.metrics.phi_stat;
        if (spec.outputs.variance) std::cout << "  var_avg = " << r.metrics.var_avg;
        if (!r.ok) std::cout << "  [" << r.status << "]";
        std::cout << "\n";
    }
    std::cout << "wrote " << (dir / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_threshold(const CommonArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load_config(args);
    if (!std::isfinite(cfg.bracket_lo) || !std::isfinite(cfg.bracket_hi)) {
        throw ConfigError("threshold requires [sweep] bracket_lo and bracket_hi");
    }
    if (!std::isfinite(cfg.tolerance)) {
        throw ConfigError("threshold requires [sweep] tolerance");
    }
    SweepSpec spec = make_sweep_spec(cfg);
    spec.values = {cfg.bracket_lo, cfg.bracket_hi};

    const fs::path dir(args.out_dir);
    fs::create_directories(dir);

    const ThresholdResult result = find_threshold(spec, cfg.predicate, cfg.tolerance);

    write_atomic(dir / "threshold.csv",
                 render_threshold_csv(spec, cfg.predicate, result));
    write_manifest(dir, cfg, "threshold", args, seconds_since(t0));

    std::cout << "threshold: " << predicate_name(cfg.predicate) << " flips at "
              << axis_name(spec.axis) << " = " << result.value << "  (bracket ["
              << result.bracket_lo << ", " << result.bracket_hi << "], "
              << result.iterations << " iterations)\n"
              << "wrote " << (dir / "threshold.csv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synchronization of two optomechanical membranes in a driven cavity: "
                 "mean-field limit cycles, phase locking, and Gaussian quantum "
                 "correlations"};
    app.set_version_flag("--version", std::string("optosync ") + optosync::k_version);
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* sim = app.add_subcommand(
        "simulate", "Integrate one parameter point and write the sampled series");
    CLI::App* swp = app.add_subcommand(
        "sweep", "Scan one parameter axis and tabulate the per-point metrics");
    CLI::App* thr = app.add_subcommand(
        "threshold", "Bisect a parameter bracket for a synchronization transition");
    add_common(sim, args);
    add_common(swp, args);
    add_common(thr, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // command-line misuse is a configuration error
    }

    try {
        if (sim->parsed()) return cmd_simulate(args);
        if (swp->parsed()) return cmd_sweep(args);
        if (thr->parsed()) return cmd_threshold(args);
        return 2;
    } catch (const optosync::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const optosync::NoSignChange& e) {
        std::cerr << "threshold not found: " << e.what() << "\n";
        return 4;
    } catch (const optosync::MaxIterations& e) {
        std::cerr << "threshold not found: " << e.what() << "\n";
        return 4;
    } catch (const optosync::SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
