#pragma once

#include <filesystem>
#include <string>

#include "optosync/sweep.hpp"

namespace optosync::cli {

/// Everything a run needs, resolved from defaults + config file + flags.
struct RunConfig {
    SystemParams system;
    ClassicalState init{{1.0, 1.0}, {0.0, 0.0}, 0.0, 0.0};
    IntegratorConfig integrator;
    AnalysisConfig analysis;
    bool quantum = false;

    SweepAxis axis = SweepAxis::eta;
    std::vector<double> values;
    OutputSet outputs;
    unsigned threads = 0;

    ThresholdPredicate predicate = ThresholdPredicate::synchronized;
    double bracket_lo = std::numeric_limits<double>::quiet_NaN();
    double bracket_hi = std::numeric_limits<double>::quiet_NaN();
    double tolerance = std::numeric_limits<double>::quiet_NaN();
};

/// Parse an INI-style file.  Sections: [system], [integrator], [sweep],
/// plus an informational [run] block as written into manifests.  Unknown
/// sections or keys are rejected with the offending line number.
RunConfig parse_config_file(const std::filesystem::path& path);

/// Parse config text (exposed for tests).
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

/// Render the fully resolved configuration as a manifest that the parser
/// accepts back unchanged (the [run] block is informational).
std::string render_manifest(const RunConfig& cfg, const std::string& command,
                            const std::string& config_source, double wall_seconds,
                            long seed);

/// Assemble the sweep spec from a resolved config.
SweepSpec make_sweep_spec(const RunConfig& cfg);

const char* axis_name(SweepAxis axis);
const char* predicate_name(ThresholdPredicate predicate);

}  // namespace optosync::cli
