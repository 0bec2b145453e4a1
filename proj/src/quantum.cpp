#include "optosync/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace optosync {

namespace {

constexpr int k_cm_entries = 21;  // upper triangle of a symmetric 6x6
constexpr int k_dim = 6 + k_cm_entries;
using VecCo = Eigen::Matrix<double, k_dim, 1>;

/// Flat index of (i, j), i <= j, in row-major upper-triangle order.
constexpr int tri_index(int i, int j) {
    return i * 6 - i * (i - 1) / 2 + (j - i);
}
static_assert(tri_index(0, 0) == 0 && tri_index(0, 5) == 5 &&
              tri_index(1, 1) == 6 && tri_index(5, 5) == 20);

Mat6 unpack_cm(const VecCo& y) {
    Mat6 v;
    for (int i = 0; i < 6; ++i) {
        for (int j = i; j < 6; ++j) {
            v(i, j) = y[6 + tri_index(i, j)];
            v(j, i) = v(i, j);
        }
    }
    return v;
}

void pack_cm(const Mat6& v, VecCo& y) {
    for (int i = 0; i < 6; ++i) {
        for (int j = i; j < 6; ++j) y[6 + tri_index(i, j)] = v(i, j);
    }
}

}  // namespace

Mat6 drift_matrix(const ClassicalState& s, const SystemParams& p) {
    const double sqrt2 = std::numbers::sqrt2;
    const double a1 = -p.g[0] * sqrt2 * s.a_re;
    const double b1 = -p.g[0] * sqrt2 * s.a_im;
    const double a2 = -p.g[1] * sqrt2 * s.a_re;
    const double b2 = -p.g[1] * sqrt2 * s.a_im;
    const double c = -p.delta + p.g[0] * s.q[0] + p.g[1] * s.q[1];

    Mat6 m = Mat6::Zero();
    m(0, 1) = p.omega[0];
    m(1, 0) = -p.omega[0];
    m(1, 1) = -p.gamma[0];
    m(1, 4) = a1;
    m(1, 5) = b1;
    m(2, 3) = p.omega[1];
    m(3, 2) = -p.omega[1];
    m(3, 3) = -p.gamma[1];
    m(3, 4) = a2;
    m(3, 5) = b2;
    m(4, 0) = -b1;
    m(4, 2) = -b2;
    m(4, 4) = -p.kappa;
    m(4, 5) = c;
    m(5, 0) = a1;
    m(5, 2) = a2;
    m(5, 4) = -c;
    m(5, 5) = -p.kappa;
    return m;
}

Mat6 diffusion_matrix(const SystemParams& p) {
    Mat6 d = Mat6::Zero();
    for (int j = 0; j < 2; ++j) {
        const double nbar =
            thermal_occupation(p.omega1_hz * p.omega[j], p.temperature[j]);
        d(2 * j + 1, 2 * j + 1) = p.gamma[j] * (2.0 * nbar + 1.0);
    }
    d(4, 4) = p.kappa;
    d(5, 5) = p.kappa;
    return d;
}

Mat6 initial_cm(const SystemParams& p) {
    Mat6 v = Mat6::Zero();
    for (int j = 0; j < 2; ++j) {
        const double nbar =
            thermal_occupation(p.omega1_hz * p.omega[j], p.temperature[j]);
        v(2 * j, 2 * j) = nbar + 0.5;
        v(2 * j + 1, 2 * j + 1) = nbar + 0.5;
    }
    v(4, 4) = 0.5;
    v(5, 5) = 0.5;
    return v;
}

Mat6 cm_time_derivative(const Mat6& v, const Mat6& a, const Mat6& d) {
    const Mat6 av = a * v;
    return av + av.transpose() + d;
}

Trajectory propagate_cm(const Mat6& v0, const ClassicalState& init,
                        const SystemParams& p, const IntegratorConfig& cfg,
                        CovarianceDiagnostics* diag) {
    validate(p);
    if ((v0 - v0.transpose()).norm() > 1e-12 * std::max(1.0, v0.norm())) {
        throw InvalidParams("propagate_cm: initial CM is not symmetric");
    }

    const Mat6 d = diffusion_matrix(p);

    VecCo y0;
    y0.head<6>() = init.to_vec();
    pack_cm(v0, y0);

    IntegratorConfig local = cfg;
    local.abs_tol = -1.0;  // per-component tolerances below
    // Mean-field block scales with the cavity amplitude; covariance block
    // with the largest initial thermal variance.
    VecCo atol;
    atol.head<6>().setConstant(resolve_abs_tol(cfg, p));
    double vscale = 1.0;
    for (int j = 0; j < 2; ++j) vscale = std::max(vscale, 2.0 * v0(2 * j, 2 * j));
    atol.tail<k_cm_entries>().setConstant(cfg.rel_tol * vscale);

    Trajectory traj;
    const auto n_samples =
        static_cast<std::size_t>(std::floor(cfg.t_end / cfg.sample_dt + 1e-9)) + 1;
    traj.t.reserve(n_samples);
    traj.states.reserve(n_samples);
    traj.cov.reserve(n_samples);

    CovarianceDiagnostics local_diag;

    auto rhs = [&p, &d](double, const VecCo& y, VecCo& dydt) {
        Vec6 dc;
        classical_rhs(p, y.head<6>(), dc);
        dydt.head<6>() = dc;
        const ClassicalState s = ClassicalState::from_vec(y.head<6>());
        const Mat6 a = drift_matrix(s, p);
        const Mat6 v = unpack_cm(y);
        const Mat6 dv = cm_time_derivative(v, a, d);
        pack_cm(dv, dydt);
    };

    auto observe = [&](double t, const VecCo& y) {
        traj.t.push_back(t);
        traj.states.push_back(ClassicalState::from_vec(y.head<6>()));
        const Mat6 v = unpack_cm(y);
        const double margin = physicality_margin(v) / std::max(1.0, v.norm());
        if (margin < local_diag.min_margin_rel) {
            local_diag.min_margin_rel = margin;
            local_diag.worst_time = t;
        }
        if (margin < -1e-6) {
            throw PhysicalityLost("propagate_cm: V + (i/2) Omega dipped to " +
                                  std::to_string(margin) + " (relative) at t = " +
                                  std::to_string(t));
        }
        traj.cov.push_back(v);
    };

    traj.stats = integrate_adaptive<k_dim>(rhs, y0, 0.0, local, observe, &atol);
    if (diag != nullptr) *diag = local_diag;
    return traj;
}

PhaseVariance phase_diff_variance(const Mat6& v, double phi1, double phi2,
                                  double n1, double n2, double n_min) {
    PhaseVariance out;
    if (!(n1 >= n_min) || !(n2 >= n_min)) {
        out.defined = false;
        return out;
    }
    const double s1 = std::sin(phi1), c1 = std::cos(phi1);
    const double s2 = std::sin(phi2), c2 = std::cos(phi2);
    // Second moments of the momentum quadrature rotated into each
    // membrane's co-moving frame.
    const double p11 = s1 * s1 * v(0, 0) - 2.0 * s1 * c1 * v(0, 1) + c1 * c1 * v(1, 1);
    const double p22 = s2 * s2 * v(2, 2) - 2.0 * s2 * c2 * v(2, 3) + c2 * c2 * v(3, 3);
    const double p12 = s1 * s2 * v(0, 2) - s1 * c2 * v(0, 3) - c1 * s2 * v(1, 2) +
                       c1 * c2 * v(1, 3);
    out.term11 = p11 / (2.0 * n1);
    out.term22 = p22 / (2.0 * n2);
    out.cross = p12 / std::sqrt(n1 * n2);
    out.raw = out.term11 + out.term22 - out.cross;
    out.defined = true;
    if (out.raw < 1e-12) {
        out.var = 0.0;
        out.clamped = true;
    } else {
        out.var = out.raw;
    }
    return out;
}

PhaseVarianceSeries phase_variance_series(const Trajectory& traj,
                                          const PhaseSeries& phases,
                                          double n_min) {
    if (traj.cov.size() != traj.t.size()) {
        throw InvalidParams("phase_variance_series: trajectory carries no covariances");
    }
    PhaseVarianceSeries out;
    out.t.reserve(phases.t.size());
    for (std::size_t k = 0; k < phases.t.size(); ++k) {
        const std::size_t i = phases.first_index + k;
        const PhaseVariance pv =
            phase_diff_variance(traj.cov[i], phases.phi1[k], phases.phi2[k],
                                phases.n1[k], phases.n2[k], n_min);
        if (!pv.defined) continue;
        out.t.push_back(phases.t[k]);
        out.index.push_back(i);
        out.var.push_back(pv.var);
        out.term11.push_back(pv.term11);
        out.term22.push_back(pv.term22);
        out.cross.push_back(pv.cross);
        out.min_raw = std::min(out.min_raw, pv.raw);
    }
    return out;
}

double time_average(const std::vector<double>& t, const std::vector<double>& y,
                    double transient_cut, std::size_t min_samples) {
    if (t.size() != y.size()) {
        throw InvalidParams("time_average: length mismatch");
    }
    const auto begin = std::lower_bound(t.begin(), t.end(), transient_cut);
    const std::size_t i0 = static_cast<std::size_t>(begin - t.begin());
    if (t.size() - i0 < std::max<std::size_t>(min_samples, 2)) {
        throw WindowTooShort("time_average: fewer than " +
                             std::to_string(min_samples) + " samples past the cut");
    }
    double acc = 0.0;
    for (std::size_t i = i0 + 1; i < t.size(); ++i) {
        acc += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
    }
    return acc / (t.back() - t[i0]);
}

}  // namespace optosync
