#include "optosync/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace optosync {

namespace {
constexpr double k_pi = std::numbers::pi;

/// Map an angle to (-pi, pi].
double wrap_angle(double x) {
    double r = std::remainder(x, 2.0 * k_pi);
    if (r <= -k_pi) r += 2.0 * k_pi;
    return r;
}
}  // namespace

void classical_rhs(const SystemParams& p, const Vec6& y, Vec6& dydt) {
    const double q1 = y[0], p1 = y[1], q2 = y[2], p2 = y[3];
    const double ar = y[4], ai = y[5];
    const double photons = ar * ar + ai * ai;
    // Effective detuning shifted by the membrane displacements.
    const double w = p.delta - p.g[0] * q1 - p.g[1] * q2;
    dydt[0] = p.omega[0] * p1;
    dydt[1] = -p.omega[0] * q1 - p.g[0] * photons - p.gamma[0] * p1;
    dydt[2] = p.omega[1] * p2;
    dydt[3] = -p.omega[1] * q2 - p.g[1] * photons - p.gamma[1] * p2;
    dydt[4] = -p.kappa * ar - w * ai + p.eta;
    dydt[5] = -p.kappa * ai + w * ar;
}

ClassicalState derivatives(const ClassicalState& s, const SystemParams& p) {
    Vec6 d;
    classical_rhs(p, s.to_vec(), d);
    return ClassicalState::from_vec(d);
}

double resolve_abs_tol(const IntegratorConfig& cfg, const SystemParams& p) {
    if (cfg.abs_tol > 0.0) return cfg.abs_tol;
    return cfg.rel_tol * std::max(1.0, p.eta / p.kappa);
}

Trajectory integrate(const ClassicalState& init, const SystemParams& p,
                     const IntegratorConfig& cfg) {
    validate(p);
    IntegratorConfig local = cfg;
    local.abs_tol = resolve_abs_tol(cfg, p);

    Trajectory traj;
    const auto n_samples =
        static_cast<std::size_t>(std::floor(cfg.t_end / cfg.sample_dt + 1e-9)) + 1;
    traj.t.reserve(n_samples);
    traj.states.reserve(n_samples);

    traj.stats = integrate_adaptive<6>(
        [&p](double, const Vec6& y, Vec6& dydt) { classical_rhs(p, y, dydt); },
        init.to_vec(), 0.0, local, [&traj](double t, const Vec6& y) {
            traj.t.push_back(t);
            traj.states.push_back(ClassicalState::from_vec(y));
        });
    return traj;
}

InstantPhase instantaneous_phase(const ClassicalState& s, double n_min) {
    InstantPhase out;
    const std::array<double, 2> q{s.q[0], s.q[1]};
    const std::array<double, 2> p{s.p[0], s.p[1]};
    for (int j = 0; j < 2; ++j) {
        out.n[j] = 0.5 * (q[j] * q[j] + p[j] * p[j]);
        if (out.n[j] >= n_min) {
            out.phi[j] = std::atan2(p[j], q[j]);
            out.defined[j] = true;
        } else {
            out.phi[j] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

PhaseSeries phase_difference(const Trajectory& traj, const SystemParams& p,
                             double n_min) {
    const double omega_max = std::max(p.omega[0], p.omega[1]);
    const double dt = traj.t.size() > 1 ? traj.t[1] - traj.t[0] : 0.0;
    if (dt <= 0.0 || traj.t.empty()) {
        throw InvalidParams("phase_difference: trajectory has no usable grid");
    }
    if (dt > 0.25 * 2.0 * k_pi / omega_max * (1.0 + 1e-12)) {
        throw UndersampledPhase(
            "phase_difference: sample_dt exceeds a quarter mechanical period");
    }

    PhaseSeries out;
    std::size_t i0 = traj.t.size();
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const InstantPhase ip = instantaneous_phase(traj.states[i], n_min);
        if (ip.defined[0] && ip.defined[1]) {
            i0 = i;
            break;
        }
    }
    if (i0 == traj.t.size()) {
        throw PhaseUndefined("phase_difference: both actions below n_min everywhere");
    }
    out.first_index = i0;

    const std::size_t n = traj.t.size() - i0;
    out.t.reserve(n);
    out.phi1.reserve(n);
    out.phi2.reserve(n);
    out.n1.reserve(n);
    out.n2.reserve(n);
    out.dphi.reserve(n);

    double unwrapped = 0.0;
    double prev_raw = 0.0;
    for (std::size_t i = i0; i < traj.t.size(); ++i) {
        const InstantPhase ip = instantaneous_phase(traj.states[i], n_min);
        // Once locked on, hold the last phase if a membrane dips below the
        // floor mid-run (rare: only during deep transient collapses).
        const double f1 = ip.defined[0] ? ip.phi[0] : (out.phi1.empty() ? 0.0 : out.phi1.back());
        const double f2 = ip.defined[1] ? ip.phi[1] : (out.phi2.empty() ? 0.0 : out.phi2.back());
        const double raw = f1 - f2;
        if (i == i0) {
            unwrapped = wrap_angle(raw);
        } else {
            const double jump = wrap_angle(raw - prev_raw);
            if (std::abs(std::abs(jump) - k_pi) < 1e-7) {
                throw UndersampledPhase(
                    "phase_difference: inter-sample jump of +-pi at t = " +
                    std::to_string(traj.t[i]));
            }
            unwrapped += jump;
        }
        prev_raw = raw;
        out.t.push_back(traj.t[i]);
        out.phi1.push_back(f1);
        out.phi2.push_back(f2);
        out.n1.push_back(ip.n[0]);
        out.n2.push_back(ip.n[1]);
        out.dphi.push_back(unwrapped);
    }
    return out;
}

PhaseStationarity stationary_phase(const PhaseSeries& series, double window_fraction,
                                   double amp_threshold, double drift_threshold) {
    if (series.t.size() < 2) {
        throw WindowTooShort("stationary_phase: series has fewer than 2 samples");
    }
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
        throw InvalidParams("stationary_phase: window_fraction must be in (0, 1]");
    }
    const double t_end = series.t.back();
    const double t_start = t_end - window_fraction * (t_end - series.t.front());
    const auto begin = std::lower_bound(series.t.begin(), series.t.end(), t_start);
    const std::size_t i0 = static_cast<std::size_t>(begin - series.t.begin());
    const std::size_t m = series.t.size() - i0;
    if (m < 16) {
        throw WindowTooShort("stationary_phase: window holds fewer than 16 samples");
    }

    double lo = series.dphi[i0], hi = series.dphi[i0];
    double sum_sin = 0.0, sum_cos = 0.0;
    // Least-squares slope of dphi vs t over the window.
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    // Accumulated rotation of each membrane phasor across the window; the
    // sampling guard in phase_difference keeps per-step jumps below pi, so
    // summing wrapped increments recovers the true winding.
    double w1 = 0.0, w2 = 0.0;
    for (std::size_t i = i0; i < series.t.size(); ++i) {
        const double y = series.dphi[i];
        lo = std::min(lo, y);
        hi = std::max(hi, y);
        sum_sin += std::sin(y);
        sum_cos += std::cos(y);
        const double tc = series.t[i] - t_start;
        st += tc;
        sy += y;
        stt += tc * tc;
        sty += tc * y;
        if (i > i0) {
            w1 += wrap_angle(series.phi1[i] - series.phi1[i - 1]);
            w2 += wrap_angle(series.phi2[i] - series.phi2[i - 1]);
        }
    }
    const double md = static_cast<double>(m);
    const double denom = md * stt - st * st;
    const double slope = denom != 0.0 ? (md * sty - st * sy) / denom : 0.0;

    PhaseStationarity out;
    out.phi_stat = std::atan2(sum_sin, sum_cos);
    if (out.phi_stat <= -k_pi) out.phi_stat += 2.0 * k_pi;
    out.phi_amp = 0.5 * (hi - lo);
    out.drift = slope * (series.t.back() - t_start);
    out.winding = {w1, w2};
    // A membrane that merely relaxes to a displaced rest point has a nearly
    // constant phase; demand at least one full turn from both before calling
    // the pair synchronized.
    out.oscillating =
        std::abs(w1) > 2.0 * k_pi && std::abs(w2) > 2.0 * k_pi;
    out.synchronized = out.oscillating && out.phi_amp < amp_threshold &&
                       std::abs(out.drift) < drift_threshold;
    return out;
}

}  // namespace optosync
