// End-to-end checks of the command-line binary: exit codes, file outputs,
// determinism, and manifest replay.  Invoked as:
//   cli_integration <path-to-optosync-binary> <scratch-dir>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    if (ok) {
        std::cout << "ok: " << what << "\n";
    } else {
        std::cerr << "FAILED: " << what << "\n";
        ++failures;
    }
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

struct Cli {
    std::string binary;
    fs::path scratch;
    int log_counter = 0;

    /// Run the binary with `args`, capture stdout+stderr, return exit code.
    int run(const std::string& args, std::string* output = nullptr) {
        const fs::path log = scratch / ("log_" + std::to_string(log_counter++) + ".txt");
        const std::string cmd =
            "\"" + binary + "\" " + args + " > \"" + log.string() + "\" 2>&1";
        const int status = std::system(cmd.c_str());
        if (output != nullptr) *output = slurp(log);
        if (status == -1) return -1;
        if (WIFEXITED(status)) return WEXITSTATUS(status);
        return 128;
    }
};

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: cli_integration <binary> <scratch-dir>\n";
        return 2;
    }
    Cli cli{argv[1], fs::path(argv[2])};
    fs::remove_all(cli.scratch);
    fs::create_directories(cli.scratch);

    // --- version and argument errors -------------------------------------
    {
        std::string out;
        check(cli.run("--version", &out) == 0, "--version exits 0");
        check(out.find("optosync 0.1.0") != std::string::npos, "--version prints the version");
        check(cli.run("") == 2, "missing subcommand exits 2");
        check(cli.run("frobnicate") == 2, "unknown subcommand exits 2");
        check(cli.run("simulate --quantum sideways") == 2, "bad flag value exits 2");
        check(cli.run("simulate --config /does/not/exist.ini") == 2,
              "missing config file exits 2");
    }

    // --- config rejection with line info ---------------------------------
    {
        const fs::path bad = cli.scratch / "bad.ini";
        spit(bad, "[system]\nunknown_knob = 1\n");
        std::string out;
        check(cli.run("simulate --config \"" + bad.string() + "\"", &out) == 2,
              "unknown config key exits 2");
        check(out.find("bad.ini:2") != std::string::npos,
              "config error names file and line");
    }

    // --- simulate with defaults: files, schema, determinism ---------------
    const fs::path out1 = cli.scratch / "run1";
    const fs::path out2 = cli.scratch / "run2";
    {
        std::string out;
        check(cli.run("simulate --out \"" + out1.string() + "\"", &out) == 0,
              "simulate with defaults exits 0");
        check(out.find("synchronized") != std::string::npos, "summary reports the verdict");
        check(fs::exists(out1 / "trajectory.csv"), "trajectory.csv written");
        check(fs::exists(out1 / "manifest.ini"), "manifest.ini written");

        const std::string csv = slurp(out1 / "trajectory.csv");
        check(first_line(csv) == "t,q1,p1,q2,p2,|a|^2,dphi",
              "classical trajectory header");
        check(csv.find("\n0,1,0,1,0,0,") == csv.find('\n'),
              "first sample row starts at t = 0 with the initial state");

        check(cli.run("simulate --out \"" + out2.string() + "\"") == 0,
              "second identical run exits 0");
        check(slurp(out1 / "trajectory.csv") == slurp(out2 / "trajectory.csv"),
              "repeated runs produce byte-identical CSV");
    }

    // --- manifest replay ---------------------------------------------------
    {
        const fs::path out3 = cli.scratch / "run3";
        check(cli.run("simulate --config \"" + (out1 / "manifest.ini").string() +
                      "\" --out \"" + out3.string() + "\"") == 0,
              "manifest replay exits 0");
        check(slurp(out1 / "trajectory.csv") == slurp(out3 / "trajectory.csv"),
              "replay from manifest reproduces the CSV byte for byte");
    }

    // --- quantum columns via the override flag -----------------------------
    {
        const fs::path cfg = cli.scratch / "short.ini";
        spit(cfg, "[integrator]\nt_end = 600\nsample_dt = 0.5\n");
        const fs::path outq = cli.scratch / "runq";
        check(cli.run("simulate --config \"" + cfg.string() + "\" --quantum on --out \"" +
                      outq.string() + "\"") == 0,
              "quantum simulate exits 0");
        const std::string csv = slurp(outq / "trajectory.csv");
        check(first_line(csv) == "t,q1,p1,q2,p2,|a|^2,dphi,phase_var,E,discord_A,discord_B",
              "quantum trajectory header");
        const std::string manifest = slurp(outq / "manifest.ini");
        check(manifest.find("quantum = on") != std::string::npos,
              "override recorded in the manifest");
    }

    // --- simulation failure maps to exit 3 ---------------------------------
    {
        const fs::path cfg = cli.scratch / "dead.ini";
        spit(cfg,
             "[system]\neta = 0\ninit_q1 = 0\ninit_q2 = 0\n"
             "[integrator]\nt_end = 50\nsample_dt = 0.5\n");
        std::string out;
        check(cli.run("simulate --config \"" + cfg.string() + "\"", &out) == 3,
              "undriven empty system exits 3");
        check(out.find("simulation error") != std::string::npos,
              "simulation failure labeled on stderr");
    }

    // --- sweep -------------------------------------------------------------
    {
        const fs::path cfg = cli.scratch / "sweep.ini";
        spit(cfg,
             "[integrator]\nt_end = 12000\nsample_dt = 0.5\n"
             "[sweep]\naxis = eta\nvalues = 3600\n");
        const fs::path outs = cli.scratch / "runs";
        std::string out;
        check(cli.run("sweep --config \"" + cfg.string() + "\" --out \"" + outs.string() +
                      "\"", &out) == 0,
              "single-point sweep exits 0");
        const std::string csv = slurp(outs / "sweep.csv");
        check(first_line(csv) ==
                  "value,phi_stat,phi_amp,drift,synchronized,var_avg,discord_A_avg,"
                  "discord_B_avg,E_max,status,steps_accepted,steps_rejected,rhs_evals,"
                  "phys_margin,t_end_used",
              "sweep CSV header");
        check(csv.find("\n3600,") != std::string::npos, "sweep row carries the axis value");
        check(csv.find(",ok,") != std::string::npos, "sweep row status is ok");

        check(cli.run("sweep") == 2, "sweep without values exits 2");
    }

    // --- threshold: missing inputs and a bracket without a sign change -----
    {
        check(cli.run("threshold") == 2, "threshold without brackets exits 2");

        const fs::path cfg = cli.scratch / "flat.ini";
        spit(cfg,
             "[integrator]\nt_end = 30000\nsample_dt = 0.5\n"
             "[sweep]\naxis = eta\nbracket_lo = 3200\nbracket_hi = 3600\n"
             "tolerance = 100\n");
        std::string out;
        check(cli.run("threshold --config \"" + cfg.string() + "\"", &out) == 4,
              "bracket without a predicate flip exits 4");
        check(out.find("threshold not found") != std::string::npos,
              "missing flip labeled on stderr");
    }

    if (failures == 0) {
        std::cout << "all cli checks passed\n";
        return 0;
    }
    std::cerr << failures << " cli check(s) failed\n";
    return 1;
}
