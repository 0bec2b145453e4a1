#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optosync/errors.hpp"

namespace optosync {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat4 = Eigen::Matrix<double, 4, 4>;

/// CODATA values, SI units.
inline constexpr double k_hbar = 1.054571817e-34;       // J s
inline constexpr double k_boltzmann = 1.380649e-23;     // J / K

/// Parameters of two mechanical modes coupled to one driven cavity mode.
///
/// All rates and frequencies are expressed in units of the first mechanical
/// frequency, so omega[0] is 1 by convention and time is measured in units of
/// 1/omega_1.  omega1_hz carries the absolute scale (rad/s) and only enters
/// through the thermal occupations of the two baths.
struct SystemParams {
    double delta = 1.0;                       // drive detuning (blue side > 0)
    double kappa = 0.05;                      // cavity amplitude decay rate
    std::array<double, 2> omega{1.0, 0.999};  // mechanical frequencies
    std::array<double, 2> gamma{5e-6, 5e-6};  // mechanical damping rates
    std::array<double, 2> g{1e-5, 1e-5};      // optomechanical couplings
    double eta = 3600.0;                      // drive amplitude
    double omega1_hz = 1e7;                   // absolute scale of omega_1, rad/s
    std::array<double, 2> temperature{0.0, 0.0};  // bath temperatures, K
};

/// Check parameter ranges; returns the validated struct unchanged.
/// Throws InvalidParams naming the offending field.
SystemParams validate(const SystemParams& p);

/// Soft sanity notes (regimes where the model is known to be strained),
/// e.g. underdamped assumptions.  Never fatal.
std::vector<std::string> validation_warnings(const SystemParams& p);

/// Bose occupation (exp(hbar w / kB T) - 1)^-1 for a mode at omega_rad_s.
/// T = 0 returns 0 exactly.  Requires omega_rad_s > 0 and T >= 0.
double thermal_occupation(double omega_rad_s, double temp_kelvin);

/// Mean-field state: membrane quadratures plus the complex cavity amplitude.
/// The flattened layout [q1, p1, q2, p2, a_re, a_im] matches the ordering of
/// the fluctuation vector used for covariance propagation.
struct ClassicalState {
    std::array<double, 2> q{0.0, 0.0};
    std::array<double, 2> p{0.0, 0.0};
    double a_re = 0.0;
    double a_im = 0.0;

    Vec6 to_vec() const {
        Vec6 v;
        v << q[0], p[0], q[1], p[1], a_re, a_im;
        return v;
    }
    static ClassicalState from_vec(const Vec6& v) {
        ClassicalState s;
        s.q = {v[0], v[2]};
        s.p = {v[1], v[3]};
        s.a_re = v[4];
        s.a_im = v[5];
        return s;
    }
    double photon_number() const { return a_re * a_re + a_im * a_im; }
};

/// Counters reported by the adaptive integrator.
struct IntegrationStats {
    std::uint64_t steps_accepted = 0;
    std::uint64_t steps_rejected = 0;
    std::uint64_t rhs_evaluations = 0;
};

/// Uniformly sampled solution.  cov is empty for mean-field-only runs,
/// otherwise cov.size() == t.size() and cov[k] is the symmetric 6x6
/// covariance matrix of the fluctuations at t[k].
struct Trajectory {
    std::vector<double> t;
    std::vector<ClassicalState> states;
    std::vector<Mat6> cov;
    IntegrationStats stats;
};

/// Summary of one run after transient removal (NaN where not computed).
struct SyncMetrics {
    double phi_stat = std::numeric_limits<double>::quiet_NaN();   // locked phase difference
    double phi_amp = std::numeric_limits<double>::quiet_NaN();    // residual oscillation amplitude
    double drift = std::numeric_limits<double>::quiet_NaN();      // net drift across the window
    bool synchronized = false;
    double var_avg = std::numeric_limits<double>::quiet_NaN();    // mean phase-difference variance
    double discord_a_avg = std::numeric_limits<double>::quiet_NaN();
    double discord_b_avg = std::numeric_limits<double>::quiet_NaN();
    double e_max = std::numeric_limits<double>::quiet_NaN();      // max of the entanglement exponent
    bool negativity = false;                                      // e_max > 0
};

/// Symplectic form for three modes in (q1,p1,q2,p2,X,Y) ordering.
Mat6 symplectic_form6();

/// Smallest eigenvalue of the Hermitian matrix V + (i/2) Omega.  Physical
/// covariance matrices give values >= 0 up to roundoff.
double physicality_margin(const Mat6& v);

/// True if physicality_margin(v) >= -tol_rel * max(1, ||V||_F).
bool is_physical(const Mat6& v, double tol_rel = 1e-6);

}  // namespace optosync
