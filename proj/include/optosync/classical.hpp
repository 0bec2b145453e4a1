#pragma once

#include <array>
#include <vector>

#include "optosync/model.hpp"
#include "optosync/ode.hpp"

namespace optosync {

/// Time derivative of the mean-field equations:
///   da/dt   = (i delta - kappa - i sum_j g_j q_j) a + eta
///   dq_j/dt = omega_j p_j
///   dp_j/dt = -omega_j q_j - g_j |a|^2 - gamma_j p_j
ClassicalState derivatives(const ClassicalState& s, const SystemParams& p);

/// Same in flattened [q1,p1,q2,p2,a_re,a_im] layout, for the integrator.
void classical_rhs(const SystemParams& p, const Vec6& y, Vec6& dydt);

/// Resolve the automatic absolute tolerance: the cavity amplitude scales
/// like eta/kappa, so the absolute floor must scale with it.
double resolve_abs_tol(const IntegratorConfig& cfg, const SystemParams& p);

/// Integrate the mean field from `init` over [0, cfg.t_end], sampling every
/// cfg.sample_dt.  Throws StepSizeUnderflow / NonFinite on failure.
Trajectory integrate(const ClassicalState& init, const SystemParams& p,
                     const IntegratorConfig& cfg);

/// Phase and action of each membrane at one instant, from b_j =
/// (q_j + i p_j) / sqrt(2): phi_j = atan2(p_j, q_j), n_j = (q_j^2 + p_j^2)/2.
/// defined[j] is false (phi NaN) while n_j < n_min.
struct InstantPhase {
    std::array<double, 2> phi{};
    std::array<double, 2> n{};
    std::array<bool, 2> defined{false, false};
};
InstantPhase instantaneous_phase(const ClassicalState& s, double n_min = 1e-6);

/// Per-sample phases, actions and the continuously unwrapped phase
/// difference dphi = phi_1 - phi_2.  Starts at the first sample where both
/// actions exceed n_min; t is the matching subset of the trajectory grid.
struct PhaseSeries {
    std::vector<double> t;
    std::vector<double> phi1, phi2;   // wrapped to (-pi, pi]
    std::vector<double> n1, n2;
    std::vector<double> dphi;         // unwrapped
    std::size_t first_index = 0;      // index into the source trajectory
};

/// Extract the phase series.  Enforces sample_dt <= (2 pi / omega_max) / 4;
/// throws UndersampledPhase when the grid is too coarse or a raw jump lands
/// on +-pi (ambiguous unwrap), PhaseUndefined when no sample has both
/// actions above n_min.
PhaseSeries phase_difference(const Trajectory& traj, const SystemParams& p,
                             double n_min = 1e-6);

/// Verdict over the trailing window of a phase series.
///   phi_stat: circular mean of dphi over the window, mapped to (-pi, pi]
///   phi_amp:  half the peak-to-peak excursion of unwrapped dphi
///   drift:    least-squares slope times window duration
///   winding:  accumulated phase of each membrane across the window
/// synchronized requires phi_amp < amp_threshold, |drift| < drift_threshold,
/// and both |winding| > 2 pi.  The winding condition rejects the quiescent
/// state below the self-oscillation threshold, where the membranes sit at a
/// fixed point and the phase difference is trivially constant.
struct PhaseStationarity {
    double phi_stat = 0.0;
    double phi_amp = 0.0;
    double drift = 0.0;
    std::array<double, 2> winding{0.0, 0.0};
    bool oscillating = false;
    bool synchronized = false;
};
PhaseStationarity stationary_phase(const PhaseSeries& series,
                                   double window_fraction = 0.2,
                                   double amp_threshold = 0.2,
                                   double drift_threshold = 0.2);

}  // namespace optosync
