#include "optosync/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace optosync {

namespace {

constexpr double k_pi = std::numbers::pi;

/// Run fn(i) for i in [0, n) on `threads` workers, preserving order of
/// results by index.  fn must not throw across the thread boundary; wrap
/// exceptions inside the result type.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

/// One attempt at a point with a fixed t_end; collects everything the
/// caller asked for.
PointResult run_once(const SystemParams& params, const IntegratorConfig& integrator,
                     const AnalysisConfig& analysis, const OutputSet& outputs,
                     const ClassicalState& init, RunSeries* series) {
    PointResult out;
    out.diag.t_end_used = integrator.t_end;
    const double cut = resolve_transient_cut(analysis, integrator);

    RunSeries local;
    RunSeries& rs = series != nullptr ? *series : local;

    CovarianceDiagnostics cov_diag;
    if (outputs.quantum()) {
        rs.traj = propagate_cm(initial_cm(params), init, params, integrator, &cov_diag);
        out.diag.phys_margin_rel = cov_diag.min_margin_rel;
    } else {
        rs.traj = integrate(init, params, integrator);
    }
    out.diag.stats = rs.traj.stats;

    rs.phases = phase_difference(rs.traj, params, analysis.n_min);
    const PhaseStationarity st = stationary_phase(rs.phases, analysis.window_fraction,
                                                  analysis.amp_threshold,
                                                  analysis.drift_threshold);
    out.metrics.phi_stat = st.phi_stat;
    out.metrics.phi_amp = st.phi_amp;
    out.metrics.drift = st.drift;
    out.metrics.synchronized = st.synchronized;

    if (outputs.quantum()) {
        if (outputs.variance) {
            rs.variance = phase_variance_series(rs.traj, rs.phases, analysis.n_min);
            out.metrics.var_avg = time_average(rs.variance.t, rs.variance.var, cut);
        }
        if (outputs.discord || outputs.negativity) {
            const std::size_t n = rs.traj.t.size();
            rs.e.reserve(n);
            if (outputs.discord) {
                rs.discord_a.reserve(n);
                rs.discord_b.reserve(n);
            }
            for (std::size_t i = 0; i < n; ++i) {
                const Mat4 r = reduce(rs.traj.cov[i]);
                const LogNegativity neg = log_negativity(r);
                rs.e.push_back(neg.e);
                rs.max_e = std::max(rs.max_e, neg.e);
                if (outputs.discord) {
                    // Series labels follow the learn-about convention: the
                    // A-discord is what a measurement on mode B reveals about
                    // mode A, and vice versa.  gaussian_discord() itself is
                    // labelled by the measured mode, hence the cross-over.
                    const DiscordAudit da =
                        gaussian_discord_audit(r, DiscordMode::b, analysis.discord_base);
                    const DiscordAudit db =
                        gaussian_discord_audit(r, DiscordMode::a, analysis.discord_base);
                    // Audit the dips relative to the conditioning of the
                    // cancellation that produced them, so hot states are
                    // judged by the same 1e-10 floor as cold ones.
                    const double dip = std::min(da.raw / std::max(1.0, da.noise_scale),
                                                db.raw / std::max(1.0, db.noise_scale));
                    rs.min_raw_discord = std::min(rs.min_raw_discord, dip);
                    rs.discord_a.push_back(std::max(0.0, da.raw));
                    rs.discord_b.push_back(std::max(0.0, db.raw));
                    if (dip < -1e-10) {
                        throw UnphysicalState("run_point: discord dipped to " +
                                              std::to_string(dip) +
                                              " of its term scale at t = " +
                                              std::to_string(rs.traj.t[i]));
                    }
                }
            }
            if (outputs.discord) {
                out.metrics.discord_a_avg = time_average(rs.traj.t, rs.discord_a, cut);
                out.metrics.discord_b_avg = time_average(rs.traj.t, rs.discord_b, cut);
            }
            // Peak of the entanglement exponent past the transient.
            double emax = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                if (rs.traj.t[i] >= cut) emax = std::max(emax, rs.e[i]);
            }
            out.metrics.e_max = emax;
            out.metrics.negativity = emax > 0.0;
        }
    }
    out.ok = true;
    out.status = "ok";
    return out;
}

}  // namespace

double resolve_transient_cut(const AnalysisConfig& analysis,
                             const IntegratorConfig& integrator) {
    if (analysis.transient_cut > 0.0) return analysis.transient_cut;
    return (2.0 / 3.0) * integrator.t_end;
}

SystemParams apply_axis(const SystemParams& base, SweepAxis axis, double value) {
    SystemParams p = base;
    switch (axis) {
        case SweepAxis::eta:
            p.eta = value;
            break;
        case SweepAxis::domega:
            p.omega[1] = p.omega[0] - value;
            break;
        case SweepAxis::coupling_ratio:
            p.g[1] = value * p.g[0];
            break;
        case SweepAxis::temperature:
            p.temperature = {value, value};
            break;
    }
    return p;
}

PointResult run_point(const SystemParams& params, const IntegratorConfig& integrator,
                      const AnalysisConfig& analysis, const OutputSet& outputs,
                      const ClassicalState& init, RunSeries* series) {
    PointResult r = run_once(params, integrator, analysis, outputs, init, series);
    if (!r.metrics.synchronized) {
        // One more chance with a longer horizon: slow transients near a
        // threshold can outlast the default window.
        IntegratorConfig longer = integrator;
        longer.t_end = 2.0 * integrator.t_end;
        AnalysisConfig analysis2 = analysis;
        if (analysis.transient_cut <= 0.0) {
            analysis2.transient_cut = -1.0;  // re-resolve against the new t_end
        }
        if (series != nullptr) *series = RunSeries{};
        r = run_once(params, longer, analysis2, outputs, init, series);
        r.diag.t_end_doubled = true;
    }
    return r;
}

SweepResult run_sweep(const SweepSpec& spec) {
    if (spec.values.empty()) {
        throw InvalidParams("run_sweep: no axis values given");
    }
    for (const double v : spec.values) {
        validate(apply_axis(spec.base, spec.axis, v));  // fail fast, pre-flight
    }
    SweepResult result;
    result.spec = spec;
    result.points.resize(spec.values.size());
    parallel_for(spec.values.size(), spec.threads, [&](std::size_t i) {
        PointResult& r = result.points[i];
        r.value = spec.values[i];
        try {
            const SystemParams p = apply_axis(spec.base, spec.axis, spec.values[i]);
            PointResult run =
                run_point(p, spec.integrator, spec.analysis, spec.outputs, spec.init);
            run.value = spec.values[i];
            r = run;
        } catch (const SimulationError& err) {
            r.ok = false;
            r.status = err.what();
        }
    });
    return result;
}

bool evaluate_predicate(const SweepSpec& spec, ThresholdPredicate predicate,
                        double value) {
    const SystemParams p = apply_axis(spec.base, spec.axis, value);
    OutputSet classical_only;  // predicates only need the mean field
    const PointResult r =
        run_point(p, spec.integrator, spec.analysis, classical_only, spec.init);
    if (!r.ok) throw SimulationError("threshold probe failed: " + r.status);
    switch (predicate) {
        case ThresholdPredicate::synchronized:
            return r.metrics.synchronized;
        case ThresholdPredicate::phase_near_pi:
            return r.metrics.synchronized &&
                   std::abs(std::abs(r.metrics.phi_stat) - k_pi) < 0.25 * k_pi;
    }
    return false;
}

ThresholdResult find_threshold(const SweepSpec& spec, ThresholdPredicate predicate,
                               double tolerance) {
    if (spec.values.size() < 2) {
        throw InvalidParams("find_threshold: need bracket endpoints in values");
    }
    if (!(tolerance > 0.0)) {
        throw InvalidParams("find_threshold: tolerance must be > 0");
    }
    double lo = spec.values.front();
    double hi = spec.values.back();
    if (!(hi > lo)) {
        throw InvalidParams("find_threshold: bracket must satisfy lo < hi");
    }
    const bool at_lo = evaluate_predicate(spec, predicate, lo);
    const bool at_hi = evaluate_predicate(spec, predicate, hi);
    if (at_lo == at_hi) {
        throw NoSignChange("find_threshold: predicate is " +
                           std::string(at_lo ? "true" : "false") +
                           " at both bracket endpoints");
    }
    ThresholdResult out;
    for (out.iterations = 0; hi - lo > tolerance; ++out.iterations) {
        if (out.iterations >= 200) {
            throw MaxIterations("find_threshold: bracket failed to close in 200 steps");
        }
        const double mid = 0.5 * (lo + hi);
        const bool at_mid = evaluate_predicate(spec, predicate, mid);
        if (at_mid == at_lo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    out.value = 0.5 * (lo + hi);
    return out;
}

}  // namespace optosync
