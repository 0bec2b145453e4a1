#include <doctest.h>

#include <cmath>
#include <numbers>

#include "optosync/classical.hpp"

using namespace optosync;

namespace {

constexpr double k_pi = std::numbers::pi;

double damped_q(double w, double g, double t) {
    const double wt = std::sqrt(w * w - 0.25 * g * g);
    return std::exp(-0.5 * g * t) *
           (std::cos(wt * t) + 0.5 * g / wt * std::sin(wt * t));
}

}  // namespace

TEST_CASE("derivatives at the origin reduce to the bare drive") {
    SystemParams p;
    p.eta = 3600.0;
    const ClassicalState d = derivatives(ClassicalState{}, p);
    CHECK(d.q[0] == 0.0);
    CHECK(d.p[0] == 0.0);
    CHECK(d.q[1] == 0.0);
    CHECK(d.p[1] == 0.0);
    CHECK(d.a_re == 3600.0);
    CHECK(d.a_im == 0.0);
}

TEST_CASE("derivatives couple displacement, radiation pressure and detuning") {
    SystemParams p;
    p.eta = 0.0;
    ClassicalState s;
    s.q = {1.0, 0.0};
    s.p = {0.0, 0.0};
    s.a_re = 2.0;
    s.a_im = 0.0;
    const ClassicalState d = derivatives(s, p);
    CHECK(d.q[0] == doctest::Approx(0.0));
    // Restoring force plus radiation pressure on membrane 1.
    CHECK(d.p[0] == doctest::Approx(-1.0 - p.g[0] * 4.0));
    CHECK(d.p[1] == doctest::Approx(-p.g[1] * 4.0));
    // Cavity rotates at the displacement-shifted detuning.
    const double w = p.delta - p.g[0] * 1.0;
    CHECK(d.a_re == doctest::Approx(-p.kappa * 2.0));
    CHECK(d.a_im == doctest::Approx(w * 2.0));
}

TEST_CASE("automatic absolute tolerance tracks the cavity amplitude scale") {
    IntegratorConfig cfg;
    SystemParams p;
    p.eta = 3600.0;
    p.kappa = 0.05;
    CHECK(resolve_abs_tol(cfg, p) == doctest::Approx(7.2e-5).epsilon(1e-12));
    p.eta = 0.0;
    CHECK(resolve_abs_tol(cfg, p) == doctest::Approx(1e-9).epsilon(1e-12));
    cfg.abs_tol = 1e-7;
    CHECK(resolve_abs_tol(cfg, p) == 1e-7);
}

TEST_CASE("decoupled membranes follow the damped-oscillator closed form") {
    SystemParams p;
    p.eta = 0.0;
    p.g = {0.0, 0.0};
    p.gamma = {1e-3, 1e-3};
    p.omega = {1.0, 0.7};
    IntegratorConfig cfg;
    cfg.t_end = 200.0;
    cfg.sample_dt = 0.5;
    ClassicalState init;
    init.q = {1.0, 1.0};
    const Trajectory traj = integrate(init, p, cfg);
    REQUIRE(traj.t.size() == 401);
    for (std::size_t i = 0; i < traj.t.size(); i += 7) {
        CHECK(traj.states[i].q[0] ==
              doctest::Approx(damped_q(1.0, 1e-3, traj.t[i])).epsilon(1e-7));
        CHECK(traj.states[i].q[1] ==
              doctest::Approx(damped_q(0.7, 1e-3, traj.t[i])).epsilon(1e-7));
    }
}

TEST_CASE("undriven cavity relaxes to the known fixed point") {
    // For g = 0 the cavity is linear: a(t) = a_ss (1 - exp((i delta - kappa) t))
    // with a_ss = eta (kappa + i delta) / (kappa^2 + delta^2).  The fixed
    // point below was computed independently at 30-digit precision.
    SystemParams p;
    p.eta = 3600.0;
    p.g = {0.0, 0.0};
    const double ss_re = 179.55112219451372;
    const double ss_im = 3591.0224438902743;
    IntegratorConfig cfg;
    cfg.t_end = 400.0;
    cfg.sample_dt = 1.0;
    // Tight local tolerances so the accumulated global error stays well
    // below the 1e-7 comparison against the closed form.
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-7;
    const Trajectory traj = integrate(ClassicalState{}, p, cfg);
    const double scale = std::hypot(ss_re, ss_im);
    for (std::size_t i = 0; i < traj.t.size(); i += 13) {
        const double t = traj.t[i];
        const double decay = std::exp(-p.kappa * t);
        const double c = std::cos(p.delta * t), s = std::sin(p.delta * t);
        const double a_re = ss_re - decay * (ss_re * c - ss_im * s);
        const double a_im = ss_im - decay * (ss_re * s + ss_im * c);
        CHECK(traj.states[i].a_re / scale == doctest::Approx(a_re / scale).epsilon(1e-7));
        CHECK(traj.states[i].a_im / scale == doctest::Approx(a_im / scale).epsilon(1e-7));
    }
    // End state is within a part in 1e4 of the fixed point.
    CHECK(traj.states.back().a_re == doctest::Approx(ss_re).epsilon(1e-4));
    CHECK(traj.states.back().a_im == doctest::Approx(ss_im).epsilon(1e-4));
}

TEST_CASE("instantaneous phase and action at cardinal points") {
    ClassicalState s;
    s.q = {1.0, 0.0};
    s.p = {0.0, 1.0};
    const InstantPhase ip = instantaneous_phase(s);
    REQUIRE(ip.defined[0]);
    REQUIRE(ip.defined[1]);
    CHECK(ip.phi[0] == doctest::Approx(0.0));
    CHECK(ip.phi[1] == doctest::Approx(k_pi / 2));
    CHECK(ip.n[0] == doctest::Approx(0.5));
    CHECK(ip.n[1] == doctest::Approx(0.5));

    s.q = {-1.0, 0.0};
    s.p = {0.0, -1.0};
    const InstantPhase ip2 = instantaneous_phase(s);
    CHECK(ip2.phi[0] == doctest::Approx(k_pi));
    CHECK(ip2.phi[1] == doctest::Approx(-k_pi / 2));

    s.q = {1e-6, 1.0};
    s.p = {0.0, 0.0};
    const InstantPhase ip3 = instantaneous_phase(s);
    CHECK_FALSE(ip3.defined[0]);
    CHECK(std::isnan(ip3.phi[0]));
    CHECK(ip3.defined[1]);
}

TEST_CASE("free membranes accumulate phase difference at the detuning rate") {
    // With g = 0 each phasor rotates backwards at its own frequency, so
    // dphi = phi1 - phi2 falls like -(omega1 - omega2) t.
    SystemParams p;
    p.eta = 0.0;
    p.g = {0.0, 0.0};
    p.omega = {1.0, 0.9};
    p.gamma = {1e-9, 1e-9};
    IntegratorConfig cfg;
    cfg.t_end = 500.0;
    cfg.sample_dt = 0.5;
    ClassicalState init;
    init.q = {1.0, 1.0};
    const Trajectory traj = integrate(init, p, cfg);
    const PhaseSeries series = phase_difference(traj, p);
    REQUIRE(series.t.size() == traj.t.size());
    for (std::size_t k = 0; k < series.t.size(); k += 50) {
        CHECK(series.dphi[k] == doctest::Approx(-0.1 * series.t[k]).epsilon(1e-5));
    }
    // Unwrapping never jumps by more than pi between samples.
    for (std::size_t k = 1; k < series.dphi.size(); ++k) {
        CHECK(std::abs(series.dphi[k] - series.dphi[k - 1]) < k_pi);
    }
}

TEST_CASE("coarse sampling of the phase is refused") {
    Trajectory traj;
    traj.t = {0.0, 2.0, 4.0};
    traj.states.resize(3);
    for (auto& s : traj.states) s.q = {1.0, 1.0};
    SystemParams p;  // omega_max = 1 -> quarter period ~ 1.57 < 2
    CHECK_THROWS_AS(phase_difference(traj, p), UndersampledPhase);
}

TEST_CASE("phase extraction requires some action") {
    SystemParams p;
    p.eta = 0.0;
    IntegratorConfig cfg;
    cfg.t_end = 10.0;
    cfg.sample_dt = 0.5;
    const Trajectory traj = integrate(ClassicalState{}, p, cfg);  // all zero
    CHECK_THROWS_AS(phase_difference(traj, p), PhaseUndefined);
}

namespace {
// Give a synthetic series self-consistent rotating phasors: phi1 retreats at
// unit rate and phi2 trails it by dphi, as on a real limit cycle.
void fill_phasors(PhaseSeries& s) {
    s.phi1.resize(s.t.size());
    s.phi2.resize(s.t.size());
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        s.phi1[i] = std::remainder(-s.t[i], 2.0 * k_pi);
        s.phi2[i] = std::remainder(-s.t[i] - s.dphi[i], 2.0 * k_pi);
    }
}
}  // namespace

TEST_CASE("stationarity verdict on synthetic locked and drifting series") {
    PhaseSeries locked;
    // Modulation period 63 time units: the 200-unit verdict window holds
    // several full periods, so the least-squares drift stays near zero.
    for (int k = 0; k <= 2000; ++k) {
        const double t = 0.5 * k;
        locked.t.push_back(t);
        locked.dphi.push_back(k_pi - 0.1 + 0.05 * std::sin(0.1 * t));
    }
    fill_phasors(locked);
    const PhaseStationarity a = stationary_phase(locked);
    CHECK(a.synchronized);
    CHECK(a.oscillating);
    // Window is the last 200 time units, phasors retreat at unit rate.
    CHECK(a.winding[0] == doctest::Approx(-200.0).epsilon(1e-2));
    CHECK(a.phi_stat == doctest::Approx(k_pi - 0.1).epsilon(2e-2));
    CHECK(a.phi_amp < 0.06);
    CHECK(std::abs(a.drift) < 0.05);

    PhaseSeries drifting;
    for (int k = 0; k <= 2000; ++k) {
        const double t = 0.5 * k;
        drifting.t.push_back(t);
        drifting.dphi.push_back(0.002 * t);
    }
    fill_phasors(drifting);
    const PhaseStationarity b = stationary_phase(drifting);
    CHECK_FALSE(b.synchronized);
    CHECK(b.oscillating);
    // Slope times the 200-unit window, well past the 0.2 rad verdict limit.
    CHECK(b.drift == doctest::Approx(0.4).epsilon(1e-2));
}

TEST_CASE("quiescent phasors are never synchronized") {
    // A pair resting at a displaced fixed point has a perfectly constant
    // phase difference but no oscillation; the verdict must reject it.
    PhaseSeries still;
    for (int k = 0; k <= 500; ++k) {
        still.t.push_back(0.5 * k);
        still.dphi.push_back(0.0);
        still.phi1.push_back(k_pi);
        still.phi2.push_back(k_pi);
    }
    const PhaseStationarity st = stationary_phase(still);
    CHECK(st.phi_amp == 0.0);
    CHECK(st.drift == 0.0);
    CHECK_FALSE(st.oscillating);
    CHECK_FALSE(st.synchronized);
    CHECK(st.winding[0] == 0.0);
}

TEST_CASE("locked phase reported modulo 2 pi") {
    PhaseSeries series;
    for (int k = 0; k <= 1000; ++k) {
        series.t.push_back(0.5 * k);
        series.dphi.push_back(3.0 * k_pi + 0.01 * std::sin(0.05 * k));
    }
    fill_phasors(series);
    const PhaseStationarity st = stationary_phase(series);
    CHECK(st.synchronized);
    CHECK(std::abs(st.phi_stat) == doctest::Approx(k_pi).epsilon(1e-3));
}

TEST_CASE("window narrower than 16 samples is refused") {
    PhaseSeries tiny;
    for (int k = 0; k < 20; ++k) {
        tiny.t.push_back(k);
        tiny.dphi.push_back(0.0);
        tiny.phi1.push_back(0.0);
        tiny.phi2.push_back(0.0);
    }
    CHECK_THROWS_AS(stationary_phase(tiny, 0.2), WindowTooShort);
}

TEST_CASE("drive below the self-oscillation threshold is not synchronized") {
    // Far below the onset the membranes decay toward rest at their own
    // frequencies; the phase difference drifts at the detuning rate and the
    // verdict must come back negative.
    SystemParams p;
    p.eta = 500.0;
    IntegratorConfig cfg;
    cfg.t_end = 6000.0;
    cfg.sample_dt = 0.5;
    ClassicalState init;
    init.q = {1.0, 1.0};
    const Trajectory traj = integrate(init, p, cfg);
    const PhaseSeries series = phase_difference(traj, p);
    const PhaseStationarity st = stationary_phase(series);
    CHECK_FALSE(st.synchronized);
}
