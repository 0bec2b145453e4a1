#pragma once

#include <vector>

#include "optosync/classical.hpp"
#include "optosync/model.hpp"
#include "optosync/ode.hpp"

namespace optosync {

/// Drift matrix of the linearized fluctuation dynamics around the given
/// mean-field state, in (dq1, dp1, dq2, dp2, dX, dY) ordering.
Mat6 drift_matrix(const ClassicalState& s, const SystemParams& p);

/// Diagonal diffusion matrix diag(0, gamma1 (2 nbar1 + 1), 0,
/// gamma2 (2 nbar2 + 1), kappa, kappa).
Mat6 diffusion_matrix(const SystemParams& p);

/// Covariance of the initial product state: each membrane thermal at its
/// bath temperature, cavity in vacuum.
Mat6 initial_cm(const SystemParams& p);

/// dV/dt = A V + V A^T + D (exposed for oracle checks).
Mat6 cm_time_derivative(const Mat6& v, const Mat6& a, const Mat6& d);

/// Per-run physicality diagnostics gathered while sampling.
struct CovarianceDiagnostics {
    double min_margin_rel = std::numeric_limits<double>::infinity();
    double worst_time = 0.0;
};

/// Co-integrate the mean field and the 21 unique covariance entries as one
/// coupled system.  The returned trajectory carries both states and cov;
/// symmetry of V is exact by construction (only the upper triangle is
/// propagated).  Each sample is checked against V + (i/2) Omega >= 0;
/// violation beyond -1e-6 * max(1, ||V||_F) throws PhysicalityLost.
Trajectory propagate_cm(const Mat6& v0, const ClassicalState& init,
                        const SystemParams& p, const IntegratorConfig& cfg,
                        CovarianceDiagnostics* diag = nullptr);

/// Variance of the phase-difference observable built from the rotated
/// momentum quadratures:
///   var = P11 / (2 n1) + P22 / (2 n2) - P12 / sqrt(n1 n2)
/// where P are the second moments of delta-p in frames rotated by the
/// mean-field phases phi1, phi2 and n_j are the mean-field actions.
struct PhaseVariance {
    double var = 0.0;        // clamped: values below 1e-12 report as 0
    double raw = 0.0;        // before the floor, for physicality audits
    double term11 = 0.0;
    double term22 = 0.0;
    double cross = 0.0;
    bool defined = false;    // false when either action is below n_min
    bool clamped = false;
};
PhaseVariance phase_diff_variance(const Mat6& v, double phi1, double phi2,
                                  double n1, double n2, double n_min = 1e-6);

/// Phase-difference variance along a covariance trajectory, aligned with the
/// phase series extracted from the same run.
struct PhaseVarianceSeries {
    std::vector<double> t;
    std::vector<double> var;       // clamped
    std::vector<double> term11, term22, cross;
    std::vector<std::size_t> index;  // sample index into the source trajectory
    double min_raw = std::numeric_limits<double>::infinity();
};
PhaseVarianceSeries phase_variance_series(const Trajectory& traj,
                                          const PhaseSeries& phases,
                                          double n_min = 1e-6);

/// Trapezoidal time average of y(t) over t >= transient_cut.  Requires at
/// least min_samples points past the cut (WindowTooShort otherwise).
double time_average(const std::vector<double>& t, const std::vector<double>& y,
                    double transient_cut, std::size_t min_samples = 100);

}  // namespace optosync
