#include "config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "optosync/version.hpp"

namespace optosync::cli {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

std::string trim(std::string s) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(s.front())) s.erase(s.begin());
    while (!s.empty() && is_space(s.back())) s.pop_back();
    return s;
}

/// Strip an inline comment: '#' or ';' preceded by whitespace (or at the
/// start of the line).
std::string strip_comment(const std::string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((s[i] == '#' || s[i] == ';') &&
            (i == 0 || std::isspace(static_cast<unsigned char>(s[i - 1])) != 0)) {
            return s.substr(0, i);
        }
    }
    return s;
}

double parse_double(const std::string& origin, int line, const std::string& key,
                    const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) {
        fail(origin, line, "key '" + key + "': cannot parse number from '" + value + "'");
    }
    return x;
}

double parse_double_or_auto(const std::string& origin, int line, const std::string& key,
                            const std::string& value) {
    if (trim(value) == "auto") return -1.0;
    return parse_double(origin, line, key, value);
}

long parse_long(const std::string& origin, int line, const std::string& key,
                const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size()) {
        fail(origin, line, "key '" + key + "': cannot parse integer from '" + value + "'");
    }
    return x;
}

bool parse_bool(const std::string& origin, int line, const std::string& key,
                const std::string& value) {
    const std::string v = trim(value);
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    fail(origin, line, "key '" + key + "': expected on/off, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string token;
    for (const char c : value) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c)) != 0) {
            if (!token.empty()) out.push_back(token);
            token.clear();
        } else {
            token.push_back(c);
        }
    }
    if (!token.empty()) out.push_back(token);
    return out;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

const char* base_name(LogBase base) {
    switch (base) {
        case LogBase::ten: return "ten";
        case LogBase::two: return "two";
        case LogBase::natural: return "natural";
    }
    return "ten";
}

}  // namespace

const char* axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::eta: return "eta";
        case SweepAxis::domega: return "domega";
        case SweepAxis::coupling_ratio: return "coupling_ratio";
        case SweepAxis::temperature: return "temperature";
    }
    return "eta";
}

const char* predicate_name(ThresholdPredicate predicate) {
    switch (predicate) {
        case ThresholdPredicate::synchronized: return "synchronized";
        case ThresholdPredicate::phase_near_pi: return "phase_near_pi";
    }
    return "synchronized";
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    bool have_values = false, have_range = false;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(origin, line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "system" && section != "integrator" && section != "sweep" &&
                section != "run") {
                fail(origin, line_no, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(origin, line_no, "expected 'key = value', got '" + line + "'");
        }
        if (section.empty()) {
            fail(origin, line_no, "key outside of any section");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto num = [&](const std::string& k) { return parse_double(origin, line_no, k, value); };

        if (section == "run") {
            // Informational block written into manifests; accepted so a
            // manifest can be replayed as a config, never interpreted.
            if (key != "version" && key != "command" && key != "config" &&
                key != "out_dir" && key != "wall_seconds" && key != "seed") {
                fail(origin, line_no, "unknown key '" + key + "' in [run]");
            }
            continue;
        }
        if (section == "system") {
            if (key == "delta") cfg.system.delta = num(key);
            else if (key == "kappa") cfg.system.kappa = num(key);
            else if (key == "omega2") cfg.system.omega[1] = num(key);
            else if (key == "gamma1") cfg.system.gamma[0] = num(key);
            else if (key == "gamma2") cfg.system.gamma[1] = num(key);
            else if (key == "g1") cfg.system.g[0] = num(key);
            else if (key == "g2") cfg.system.g[1] = num(key);
            else if (key == "eta") cfg.system.eta = num(key);
            else if (key == "omega1_hz") cfg.system.omega1_hz = num(key);
            else if (key == "temperature") cfg.system.temperature = {num(key), num(key)};
            else if (key == "temperature1") cfg.system.temperature[0] = num(key);
            else if (key == "temperature2") cfg.system.temperature[1] = num(key);
            else if (key == "init_q1") cfg.init.q[0] = num(key);
            else if (key == "init_p1") cfg.init.p[0] = num(key);
            else if (key == "init_q2") cfg.init.q[1] = num(key);
            else if (key == "init_p2") cfg.init.p[1] = num(key);
            else if (key == "init_a_re") cfg.init.a_re = num(key);
            else if (key == "init_a_im") cfg.init.a_im = num(key);
            else fail(origin, line_no, "unknown key '" + key + "' in [system]");
        } else if (section == "integrator") {
            if (key == "rel_tol") cfg.integrator.rel_tol = num(key);
            else if (key == "abs_tol")
                cfg.integrator.abs_tol = parse_double_or_auto(origin, line_no, key, value);
            else if (key == "max_step") cfg.integrator.max_step = num(key);
            else if (key == "t_end") cfg.integrator.t_end = num(key);
            else if (key == "sample_dt") cfg.integrator.sample_dt = num(key);
            else if (key == "quantum") cfg.quantum = parse_bool(origin, line_no, key, value);
            else if (key == "transient_cut")
                cfg.analysis.transient_cut = parse_double_or_auto(origin, line_no, key, value);
            else if (key == "window_fraction") cfg.analysis.window_fraction = num(key);
            else if (key == "amp_threshold") cfg.analysis.amp_threshold = num(key);
            else if (key == "drift_threshold") cfg.analysis.drift_threshold = num(key);
            else if (key == "n_min") cfg.analysis.n_min = num(key);
            else if (key == "discord_base") {
                const std::string v = trim(value);
                if (v == "ten") cfg.analysis.discord_base = LogBase::ten;
                else if (v == "two") cfg.analysis.discord_base = LogBase::two;
                else if (v == "natural") cfg.analysis.discord_base = LogBase::natural;
                else fail(origin, line_no, "discord_base must be ten/two/natural");
            } else fail(origin, line_no, "unknown key '" + key + "' in [integrator]");
        } else if (section == "sweep") {
            if (key == "axis") {
                const std::string v = trim(value);
                if (v == "eta") cfg.axis = SweepAxis::eta;
                else if (v == "domega") cfg.axis = SweepAxis::domega;
                else if (v == "coupling_ratio") cfg.axis = SweepAxis::coupling_ratio;
                else if (v == "temperature") cfg.axis = SweepAxis::temperature;
                else fail(origin, line_no, "unknown axis '" + v + "'");
            } else if (key == "values") {
                if (have_range) fail(origin, line_no, "give either 'values' or 'range', not both");
                have_values = true;
                cfg.values.clear();
                for (const auto& tok : split_list(value)) {
                    cfg.values.push_back(parse_double(origin, line_no, key, tok));
                }
                if (cfg.values.empty()) fail(origin, line_no, "'values' list is empty");
            } else if (key == "range") {
                if (have_values) fail(origin, line_no, "give either 'values' or 'range', not both");
                have_range = true;
                std::vector<std::string> parts;
                std::string token;
                for (const char c : trim(value)) {
                    if (c == ':') {
                        parts.push_back(token);
                        token.clear();
                    } else {
                        token.push_back(c);
                    }
                }
                parts.push_back(token);
                if (parts.size() != 3) fail(origin, line_no, "range must be lo:hi:count");
                const double lo = parse_double(origin, line_no, key, parts[0]);
                const double hi = parse_double(origin, line_no, key, parts[1]);
                const long count = parse_long(origin, line_no, key, parts[2]);
                if (count < 2) fail(origin, line_no, "range count must be >= 2");
                cfg.values.clear();
                for (long i = 0; i < count; ++i) {
                    cfg.values.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                                  static_cast<double>(count - 1));
                }
            } else if (key == "outputs") {
                OutputSet set;
                for (const auto& tok : split_list(value)) {
                    if (tok == "phase") set.phase = true;
                    else if (tok == "variance") set.variance = true;
                    else if (tok == "discord") set.discord = true;
                    else if (tok == "negativity") set.negativity = true;
                    else if (tok == "all") set = OutputSet{true, true, true, true};
                    else fail(origin, line_no, "unknown output '" + tok + "'");
                }
                cfg.outputs = set;
            } else if (key == "threads") {
                const long n = parse_long(origin, line_no, key, value);
                if (n < 0) fail(origin, line_no, "threads must be >= 0");
                cfg.threads = static_cast<unsigned>(n);
            } else if (key == "predicate") {
                const std::string v = trim(value);
                if (v == "synchronized") cfg.predicate = ThresholdPredicate::synchronized;
                else if (v == "phase_near_pi") cfg.predicate = ThresholdPredicate::phase_near_pi;
                else fail(origin, line_no, "unknown predicate '" + v + "'");
            } else if (key == "bracket_lo") cfg.bracket_lo = num(key);
            else if (key == "bracket_hi") cfg.bracket_hi = num(key);
            else if (key == "tolerance") cfg.tolerance = num(key);
            else fail(origin, line_no, "unknown key '" + key + "' in [sweep]");
        }
    }

    try {
        validate(cfg.system);
    } catch (const InvalidParams& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

std::string render_manifest(const RunConfig& cfg, const std::string& command,
                            const std::string& config_source, double wall_seconds,
                            long seed) {
    std::ostringstream out;
    out << "# run manifest; replayable as a config file\n";
    out << "[run]\n";
    out << "version = " << k_version << "\n";
    out << "command = " << command << "\n";
    out << "config = " << (config_source.empty() ? "<defaults>" : config_source) << "\n";
    out << "wall_seconds = " << format_double(wall_seconds) << "\n";
    out << "seed = " << seed << "\n";
    out << "\n[system]\n";
    out << "delta = " << format_double(cfg.system.delta) << "\n";
    out << "kappa = " << format_double(cfg.system.kappa) << "\n";
    out << "omega2 = " << format_double(cfg.system.omega[1]) << "\n";
    out << "gamma1 = " << format_double(cfg.system.gamma[0]) << "\n";
    out << "gamma2 = " << format_double(cfg.system.gamma[1]) << "\n";
    out << "g1 = " << format_double(cfg.system.g[0]) << "\n";
    out << "g2 = " << format_double(cfg.system.g[1]) << "\n";
    out << "eta = " << format_double(cfg.system.eta) << "\n";
    out << "omega1_hz = " << format_double(cfg.system.omega1_hz) << "\n";
    out << "temperature1 = " << format_double(cfg.system.temperature[0]) << "\n";
    out << "temperature2 = " << format_double(cfg.system.temperature[1]) << "\n";
    out << "init_q1 = " << format_double(cfg.init.q[0]) << "\n";
    out << "init_p1 = " << format_double(cfg.init.p[0]) << "\n";
    out << "init_q2 = " << format_double(cfg.init.q[1]) << "\n";
    out << "init_p2 = " << format_double(cfg.init.p[1]) << "\n";
    out << "init_a_re = " << format_double(cfg.init.a_re) << "\n";
    out << "init_a_im = " << format_double(cfg.init.a_im) << "\n";
    out << "\n[integrator]\n";
    out << "rel_tol = " << format_double(cfg.integrator.rel_tol) << "\n";
    if (cfg.integrator.abs_tol > 0.0) {
        out << "abs_tol = " << format_double(cfg.integrator.abs_tol) << "\n";
    } else {
        out << "abs_tol = auto\n";
    }
    out << "max_step = " << format_double(cfg.integrator.max_step) << "\n";
    out << "t_end = " << format_double(cfg.integrator.t_end) << "\n";
    out << "sample_dt = " << format_double(cfg.integrator.sample_dt) << "\n";
    out << "quantum = " << (cfg.quantum ? "on" : "off") << "\n";
    if (cfg.analysis.transient_cut > 0.0) {
        out << "transient_cut = " << format_double(cfg.analysis.transient_cut) << "\n";
    } else {
        out << "transient_cut = auto\n";
    }
    out << "window_fraction = " << format_double(cfg.analysis.window_fraction) << "\n";
    out << "amp_threshold = " << format_double(cfg.analysis.amp_threshold) << "\n";
    out << "drift_threshold = " << format_double(cfg.analysis.drift_threshold) << "\n";
    out << "n_min = " << format_double(cfg.analysis.n_min) << "\n";
    out << "discord_base = " << base_name(cfg.analysis.discord_base) << "\n";
    out << "\n[sweep]\n";
    out << "axis = " << axis_name(cfg.axis) << "\n";
    if (!cfg.values.empty()) {
        out << "values = ";
        for (std::size_t i = 0; i < cfg.values.size(); ++i) {
            if (i > 0) out << ", ";
            out << format_double(cfg.values[i]);
        }
        out << "\n";
    }
    out << "outputs =";
    if (cfg.outputs.phase) out << " phase";
    if (cfg.outputs.variance) out << " variance";
    if (cfg.outputs.discord) out << " discord";
    if (cfg.outputs.negativity) out << " negativity";
    out << "\n";
    out << "threads = " << cfg.threads << "\n";
    out << "predicate = " << predicate_name(cfg.predicate) << "\n";
    if (std::isfinite(cfg.bracket_lo)) out << "bracket_lo = " << format_double(cfg.bracket_lo) << "\n";
    if (std::isfinite(cfg.bracket_hi)) out << "bracket_hi = " << format_double(cfg.bracket_hi) << "\n";
    if (std::isfinite(cfg.tolerance)) out << "tolerance = " << format_double(cfg.tolerance) << "\n";
    return out.str();
}

SweepSpec make_sweep_spec(const RunConfig& cfg) {
    SweepSpec spec;
    spec.base = cfg.system;
    spec.axis = cfg.axis;
    spec.values = cfg.values;
    spec.outputs = cfg.outputs;
    if (cfg.quantum) {
        // Quantum flag promotes the full observable set unless the config
        // already narrowed it.
        if (!spec.outputs.quantum()) {
            spec.outputs.variance = spec.outputs.discord = spec.outputs.negativity = true;
        }
    }
    spec.integrator = cfg.integrator;
    spec.analysis = cfg.analysis;
    spec.init = cfg.init;
    spec.threads = cfg.threads;
    return spec;
}

}  // namespace optosync::cli
