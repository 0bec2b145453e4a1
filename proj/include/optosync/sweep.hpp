#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "optosync/classical.hpp"
#include "optosync/correlations.hpp"
#include "optosync/model.hpp"
#include "optosync/quantum.hpp"

namespace optosync {

/// Parameter being scanned.
///   eta            : drive amplitude
///   domega         : frequency splitting, omega2 = 1 - value
///   coupling_ratio : g2 = value * g1 (g1 fixed)
///   temperature    : both bath temperatures, K
enum class SweepAxis { eta, domega, coupling_ratio, temperature };

/// Which observables to compute per point.  Any of variance / discord /
/// negativity switches on covariance propagation.
struct OutputSet {
    bool phase = true;
    bool variance = false;
    bool discord = false;
    bool negativity = false;
    bool quantum() const { return variance || discord || negativity; }
};

/// Post-processing knobs shared by single runs and sweeps.
/// transient_cut <= 0 resolves to (2/3) * t_end.
struct AnalysisConfig {
    double transient_cut = -1.0;
    double window_fraction = 0.2;
    double amp_threshold = 0.2;     // rad
    double drift_threshold = 0.2;   // rad across the window
    double n_min = 1e-6;
    LogBase discord_base = LogBase::ten;
};

double resolve_transient_cut(const AnalysisConfig& analysis,
                             const IntegratorConfig& integrator);

/// One sweep: a base parameter set, the axis, the values to visit, and the
/// shared integrator/analysis settings.  threads = 0 uses the hardware
/// concurrency.
struct SweepSpec {
    SystemParams base;
    SweepAxis axis = SweepAxis::eta;
    std::vector<double> values;
    OutputSet outputs;
    IntegratorConfig integrator;
    AnalysisConfig analysis;
    ClassicalState init{{1.0, 1.0}, {0.0, 0.0}, 0.0, 0.0};
    unsigned threads = 0;
};

/// Apply one axis value to a copy of the base parameters.
SystemParams apply_axis(const SystemParams& base, SweepAxis axis, double value);

/// Per-point integrator diagnostics carried into the output table.
struct PointDiagnostics {
    IntegrationStats stats;
    double phys_margin_rel = std::numeric_limits<double>::quiet_NaN();
    double t_end_used = 0.0;
    bool t_end_doubled = false;
};

/// Outcome of one parameter point.  ok == false means the run raised a
/// simulation error; `status` holds "ok" or the error text.
struct PointResult {
    double value = 0.0;
    SyncMetrics metrics;
    PointDiagnostics diag;
    bool ok = false;
    std::string status;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<PointResult> points;
};

/// Full per-sample series of a single run, for trajectory output.
struct RunSeries {
    Trajectory traj;
    PhaseSeries phases;
    PhaseVarianceSeries variance;
    std::vector<double> e;            // entanglement exponent per sample
    std::vector<double> discord_a;    // discord of membrane 1 (measurement on 2)
    std::vector<double> discord_b;    // discord of membrane 2 (measurement on 1)
    // Most negative unclamped discord seen, normalized by the conditioning
    // of the cancellation that produced it (>= -1e-10 when physical).
    double min_raw_discord = std::numeric_limits<double>::infinity();
    double max_e = -std::numeric_limits<double>::infinity();
};

/// Run one parameter point end to end: integrate, extract phases, judge
/// synchronization, and (if requested) the covariance-based observables.
/// A point that fails the stationarity check is retried once with doubled
/// t_end before being reported as unsynchronized.  When `series` is given
/// the full sampled series are copied out (skipping the retry shortcut
/// does not apply; the final run's series are returned).
PointResult run_point(const SystemParams& params, const IntegratorConfig& integrator,
                      const AnalysisConfig& analysis, const OutputSet& outputs,
                      const ClassicalState& init, RunSeries* series = nullptr);

/// Visit every value of the spec (in order) and collect the per-point rows.
/// Deterministic: results are identical for any thread count.
SweepResult run_sweep(const SweepSpec& spec);

/// Predicate for threshold location.
///   synchronized : the stationarity verdict of the point
///   phase_near_pi: synchronized and |phi_stat| within pi/4 of pi
enum class ThresholdPredicate { synchronized, phase_near_pi };

struct ThresholdResult {
    double value = 0.0;       // midpoint of the final bracket
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int iterations = 0;
};

/// Bisect the sweep axis between spec.values.front() and spec.values.back()
/// until the bracket is narrower than `tolerance`.  The predicate must
/// differ at the two endpoints (NoSignChange otherwise); MaxIterations
/// guards the loop at 200 halvings.
ThresholdResult find_threshold(const SweepSpec& spec, ThresholdPredicate predicate,
                               double tolerance);

/// Evaluate a predicate at one axis value (exposed for the CLI and tests).
bool evaluate_predicate(const SweepSpec& spec, ThresholdPredicate predicate,
                        double value);

}  // namespace optosync
