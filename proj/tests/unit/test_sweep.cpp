#include <doctest.h>

#include <cmath>

#include "optosync/sweep.hpp"

using namespace optosync;

namespace {

SweepSpec baseline_spec(double t_end) {
    SweepSpec s;
    s.integrator.t_end = t_end;
    s.integrator.sample_dt = 0.5;
    s.threads = 1;
    return s;
}

}  // namespace

TEST_CASE("axis application is exact") {
    SystemParams base;
    const SystemParams pe = apply_axis(base, SweepAxis::eta, 2750.0);
    CHECK(pe.eta == 2750.0);
    CHECK(pe.omega[1] == base.omega[1]);

    const SystemParams pd = apply_axis(base, SweepAxis::domega, 0.004);
    CHECK(pd.omega[0] == 1.0);
    CHECK(pd.omega[1] == 1.0 - 0.004);

    const SystemParams pc = apply_axis(base, SweepAxis::coupling_ratio, 12.0);
    CHECK(pc.g[0] == base.g[0]);
    CHECK(pc.g[1] == 12.0 * base.g[0]);

    const SystemParams pt = apply_axis(base, SweepAxis::temperature, 7.5);
    CHECK(pt.temperature[0] == 7.5);
    CHECK(pt.temperature[1] == 7.5);
}

TEST_CASE("transient cut resolves to two thirds of the horizon") {
    AnalysisConfig a;
    IntegratorConfig i;
    i.t_end = 30000.0;
    CHECK(resolve_transient_cut(a, i) == doctest::Approx(20000.0).epsilon(1e-15));
    a.transient_cut = 1234.5;
    CHECK(resolve_transient_cut(a, i) == 1234.5);
}

TEST_CASE("sweep validates every axis value up front") {
    SweepSpec s = baseline_spec(100.0);
    s.axis = SweepAxis::eta;
    s.values = {3600.0, -5.0};
    CHECK_THROWS_AS(run_sweep(s), InvalidParams);
    s.values.clear();
    CHECK_THROWS_AS(run_sweep(s), InvalidParams);
}

TEST_CASE("per-point simulation errors are captured in rows") {
    SweepSpec s = baseline_spec(100.0);
    s.integrator.sample_dt = 2.0;  // coarser than a quarter period
    s.values = {3600.0};
    const SweepResult r = run_sweep(s);
    REQUIRE(r.points.size() == 1);
    CHECK_FALSE(r.points[0].ok);
    CHECK(r.points[0].status.find("quarter") != std::string::npos);
}

TEST_CASE("below-threshold point is retried once and stays unsynchronized") {
    SweepSpec s = baseline_spec(3000.0);
    const PointResult r = run_point(apply_axis(s.base, SweepAxis::eta, 500.0),
                                    s.integrator, s.analysis, s.outputs, s.init);
    CHECK(r.ok);
    CHECK_FALSE(r.metrics.synchronized);
    CHECK(r.diag.t_end_doubled);
    CHECK(r.diag.t_end_used == 6000.0);
}

TEST_CASE("degenerate single-value sweep equals the direct run bit for bit") {
    SweepSpec s = baseline_spec(10000.0);
    s.values = {3600.0};
    const SweepResult sweep = run_sweep(s);
    REQUIRE(sweep.points.size() == 1);
    REQUIRE(sweep.points[0].ok);

    const PointResult direct = run_point(apply_axis(s.base, s.axis, 3600.0),
                                         s.integrator, s.analysis, s.outputs, s.init);
    CHECK(sweep.points[0].metrics.phi_stat == direct.metrics.phi_stat);
    CHECK(sweep.points[0].metrics.phi_amp == direct.metrics.phi_amp);
    CHECK(sweep.points[0].metrics.drift == direct.metrics.drift);
    CHECK(sweep.points[0].metrics.synchronized == direct.metrics.synchronized);
    CHECK(sweep.points[0].diag.stats.steps_accepted == direct.diag.stats.steps_accepted);
    CHECK(sweep.points[0].diag.t_end_used == direct.diag.t_end_used);
}

TEST_CASE("thread count does not change sweep results") {
    SweepSpec serial = baseline_spec(10000.0);
    serial.values = {3200.0, 3600.0, 4000.0};
    SweepSpec parallel = serial;
    parallel.threads = 3;
    const SweepResult a = run_sweep(serial);
    const SweepResult b = run_sweep(parallel);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].value == b.points[i].value);
        CHECK(a.points[i].ok == b.points[i].ok);
        CHECK(a.points[i].metrics.phi_stat == b.points[i].metrics.phi_stat);
        CHECK(a.points[i].metrics.phi_amp == b.points[i].metrics.phi_amp);
        CHECK(a.points[i].diag.stats.steps_accepted == b.points[i].diag.stats.steps_accepted);
    }
}

TEST_CASE("threshold input validation") {
    SweepSpec s = baseline_spec(1000.0);
    s.values = {500.0};
    CHECK_THROWS_AS(find_threshold(s, ThresholdPredicate::synchronized, 10.0),
                    InvalidParams);
    s.values = {500.0, 1000.0};
    CHECK_THROWS_AS(find_threshold(s, ThresholdPredicate::synchronized, 0.0),
                    InvalidParams);
    s.values = {1000.0, 500.0};
    CHECK_THROWS_AS(find_threshold(s, ThresholdPredicate::synchronized, 10.0),
                    InvalidParams);
}

TEST_CASE("no sign change across the bracket is reported") {
    // Both endpoints deep in the synchronized regime.
    SweepSpec s = baseline_spec(30000.0);
    s.values = {3200.0, 3600.0};
    CHECK_THROWS_AS(find_threshold(s, ThresholdPredicate::synchronized, 100.0),
                    NoSignChange);
}

TEST_CASE("frequency-splitting threshold is bracketed by bisection") {
    // At strong drive the pair tolerates only a narrow frequency splitting;
    // scanning that splitting gives a fast, well-separated predicate flip.
    SweepSpec s = baseline_spec(30000.0);
    s.base.eta = 3600.0;
    s.axis = SweepAxis::domega;
    // The top endpoint stays below the re-entrant locking tongue further out
    // on the splitting axis, so the bracket holds exactly one flip.
    s.values = {0.002, 0.006};
    const ThresholdResult r =
        find_threshold(s, ThresholdPredicate::synchronized, 0.002);
    CHECK(r.bracket_hi - r.bracket_lo <= 0.002);
    CHECK(r.bracket_lo >= 0.002);
    CHECK(r.bracket_hi <= 0.006);
    CHECK(r.value > 0.0025);
    CHECK(r.value < 0.0065);
    CHECK(r.iterations >= 1);
}
