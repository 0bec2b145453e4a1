#pragma once

#include <utility>
#include <vector>

#include "optosync/model.hpp"

namespace optosync {

/// Logarithm base used by the entropic measures (discord).  The
/// entanglement exponent always uses the natural log.
enum class LogBase { ten, two, natural };

/// Which mode the Gaussian measurement acts on.  Mode A is the first
/// membrane (rows 0-1 of the reduced CM), mode B the second (rows 2-3).
enum class DiscordMode { a, b };

/// Keep the two mechanical modes: rows/columns 0-3 of the full CM.
Mat4 reduce(const Mat6& v);

/// detA, detB, detC and det(sigma) of the two-mode CM in the normalized
/// convention sigma = 2 V (vacuum variance 1).  Input v uses the 1/2
/// convention, as produced by the propagator.
struct SymplecticInvariants {
    double alpha = 0.0;  // det of mode-A block
    double beta = 0.0;   // det of mode-B block
    double gamma = 0.0;  // det of the cross block (sign carries meaning)
    double delta = 0.0;  // det of the full 4x4
};
SymplecticInvariants symplectic_invariants(const Mat4& v);

/// Symplectic spectrum {nu_plus, nu_minus} of sigma = 2 V via
/// nu^2 = (S +- sqrt(S^2 - 4 delta)) / 2, S = alpha + beta + 2 gamma.
/// Physical states satisfy nu_minus >= 1; values below 1 - 1e-6 * max(1,
/// nu_plus) throw UnphysicalState, smaller dips clamp to 1.
std::pair<double, double> symplectic_eigenvalues(const Mat4& v);

/// Entanglement of the two-mode state.  e = -ln(2 nu_tilde_minus) where
/// nu_tilde_minus is the smaller symplectic eigenvalue of the partial
/// transpose, computed directly in the 1/2 convention.  e_n = max(0, e) is
/// the logarithmic negativity.
struct LogNegativity {
    double e = 0.0;
    double e_n = 0.0;
    double nu_tilde_minus = 0.0;
};
LogNegativity log_negativity(const Mat4& v);

/// Entropic kernel f(x) = ((x+1)/2) log((x+1)/2) - ((x-1)/2) log((x-1)/2)
/// for x >= 1 (f(1) = 0).  Arguments in [1 - 1e-6, 1) clamp to 1 (absorbing
/// the cancellation noise of near-pure states); smaller throw DomainError.
double f_function(double x, LogBase base = LogBase::ten);

/// Gaussian quantum discord of the two-mode state with the measurement on
/// `mode`, in the chosen log base.  The discord is a near-total cancellation
/// of entropic terms, so the zero floor is relative to the conditioning of
/// that cancellation: raw values within -1e-10 * max(1, noise_scale) of zero
/// clamp to 0; anything lower throws UnphysicalState.
double gaussian_discord(const Mat4& v, DiscordMode mode, LogBase base = LogBase::ten);

/// Raw (unclamped) discord, for physicality audits.
double gaussian_discord_raw(const Mat4& v, DiscordMode mode, LogBase base = LogBase::ten);

/// Raw discord together with the error amplification of the cancellations
/// that produced it (summed entropic-term magnitude and the big-over-small
/// ratios of the near-cancelling invariant combinations).
/// `raw / max(1, noise_scale)` is the conditioning-free dip used by audits.
struct DiscordAudit {
    double raw = 0.0;
    double noise_scale = 0.0;
};
DiscordAudit gaussian_discord_audit(const Mat4& v, DiscordMode mode,
                                    LogBase base = LogBase::ten);

/// Trapezoidal average of a discord series past the transient cut; thin
/// wrapper so callers do not need the quantum header.
double discord_time_average(const std::vector<double>& t,
                            const std::vector<double>& d, double transient_cut);

}  // namespace optosync
