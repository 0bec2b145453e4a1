#include "optosync/correlations.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "optosync/quantum.hpp"

namespace optosync {

namespace {

double log_in_base(double x, LogBase base) {
    switch (base) {
        case LogBase::ten: return std::log10(x);
        case LogBase::two: return std::log2(x);
        case LogBase::natural: return std::log(x);
    }
    return std::log10(x);
}

/// sqrt with a relative tolerance for arguments driven slightly negative by
/// cancellation; genuinely negative arguments raise UnphysicalState.
double guarded_sqrt(double x, double scale, const char* where) {
    if (x < 0.0) {
        if (x > -1e-9 * std::max(1.0, scale)) return 0.0;
        std::ostringstream msg;
        msg << where << ": square-root argument " << x << " negative beyond tolerance";
        throw UnphysicalState(msg.str());
    }
    return std::sqrt(x);
}

struct NormalizedInvariants {
    double alpha, beta, gamma, delta;
};

NormalizedInvariants invariants_on(const Mat4& v) {
    const Mat4 sigma = 2.0 * v;
    NormalizedInvariants inv;
    inv.alpha = sigma.block<2, 2>(0, 0).determinant();
    inv.beta = sigma.block<2, 2>(2, 2).determinant();
    inv.gamma = sigma.block<2, 2>(0, 2).determinant();
    inv.delta = sigma.determinant();
    return inv;
}

/// Big-over-small ratio of a cancellation: how much relative error in the
/// inputs is amplified into the result `small` built from terms of summed
/// magnitude `big`.
double cancellation_ratio(double big, double small) {
    return big / std::max(std::abs(small), 1e-300);
}

struct ConditionalDet {
    double eps;   // det of the conditional CM
    double cond;  // conditioning of the cancellations that produced it
};

/// det of the conditional mode-A CM after an optimal Gaussian measurement
/// on mode B, minimized over measurements (two analytic branches).
ConditionalDet conditional_det(const NormalizedInvariants& in) {
    const double alpha = in.alpha, beta = in.beta, gamma = in.gamma, delta = in.delta;
    const double lhs = (delta - alpha * beta) * (delta - alpha * beta);
    const double rhs = (beta + 1.0) * gamma * gamma * (alpha + delta);
    const double bm1 = beta - 1.0;
    if (lhs <= rhs && bm1 * bm1 > 1e-28) {
        const double rad = gamma * gamma + bm1 * (delta - alpha);
        const double root = guarded_sqrt(rad, alpha * beta, "conditional_det");
        const double t1 = 2.0 * gamma * gamma;
        const double t2 = bm1 * (delta - alpha);
        const double t3 = 2.0 * std::abs(gamma) * root;
        const double num = t1 + t2 + t3;
        const double cond =
            std::max(cancellation_ratio(std::abs(t1) + std::abs(t2) + t3, num),
                     cancellation_ratio(gamma * gamma + std::abs(t2), rad));
        return {num / (bm1 * bm1), cond};
    }
    const double g2 = gamma * gamma;
    const double dab = delta - alpha * beta;
    const double rad = g2 * g2 + dab * dab - 2.0 * g2 * (alpha * beta + delta);
    const double root = guarded_sqrt(rad, alpha * beta, "conditional_det");
    const double num = alpha * beta - g2 + delta - root;
    const double cond = std::max(
        cancellation_ratio(alpha * beta + g2 + std::abs(delta) + root, num),
        cancellation_ratio(g2 * g2 + dab * dab + 2.0 * g2 * (alpha * beta + delta), rad));
    return {num / (2.0 * beta), cond};
}

NormalizedInvariants swapped(const NormalizedInvariants& in) {
    return {in.beta, in.alpha, in.gamma, in.delta};
}

DiscordAudit discord_impl(const Mat4& v, DiscordMode mode, LogBase base) {
    // The closed form below measures the mode whose block determinant sits
    // in the beta slot; measuring A therefore swaps the roles.
    NormalizedInvariants in = invariants_on(v);
    if (mode == DiscordMode::a) in = swapped(in);

    const double s = in.alpha + in.beta + 2.0 * in.gamma;
    const double root = guarded_sqrt(s * s - 4.0 * in.delta, s * s, "gaussian_discord");
    const double nu_plus = guarded_sqrt(0.5 * (s + root), s, "gaussian_discord");
    const double nu_minus = guarded_sqrt(0.5 * (s - root), s, "gaussian_discord");
    if (nu_minus < 1.0 - 1e-6 * std::max(1.0, nu_plus)) {
        throw UnphysicalState("gaussian_discord: smaller symplectic eigenvalue " +
                              std::to_string(nu_minus) + " below 1");
    }
    const ConditionalDet eps = conditional_det(in);
    const double f_beta = f_function(std::sqrt(in.beta), base);
    const double f_minus = f_function(std::max(nu_minus, 1.0), base);
    const double f_plus = f_function(std::max(nu_plus, 1.0), base);
    const double f_eps = f_function(guarded_sqrt(eps.eps, 1.0, "gaussian_discord"), base);
    DiscordAudit out;
    out.raw = f_beta - f_minus - f_plus + f_eps;
    // The result is a near-total cancellation, so its achievable accuracy is
    // set by how strongly input error is amplified along the way: by the sum
    // of the four entropic terms that cancel, by the extraction of nu_minus
    // from s - sqrt(s^2 - 4*delta) (for hot states s and the root agree to
    // several digits), and by the conditional-det branches.  Capped so a
    // hopelessly ill-conditioned evaluation still fails its audit.
    const double f_sum = std::abs(f_beta) + std::abs(f_minus) + std::abs(f_plus) +
                         std::abs(f_eps);
    const double cond_nu = cancellation_ratio(s, s - root);
    out.noise_scale = std::min(1e6, std::max({f_sum, cond_nu, eps.cond}));
    return out;
}

}  // namespace

Mat4 reduce(const Mat6& v) { return v.topLeftCorner<4, 4>(); }

SymplecticInvariants symplectic_invariants(const Mat4& v) {
    const NormalizedInvariants in = invariants_on(v);
    return {in.alpha, in.beta, in.gamma, in.delta};
}

std::pair<double, double> symplectic_eigenvalues(const Mat4& v) {
    const NormalizedInvariants in = invariants_on(v);
    const double s = in.alpha + in.beta + 2.0 * in.gamma;
    const double root = guarded_sqrt(s * s - 4.0 * in.delta, s * s,
                                     "symplectic_eigenvalues");
    const double nu_plus = guarded_sqrt(0.5 * (s + root), s, "symplectic_eigenvalues");
    double nu_minus = guarded_sqrt(0.5 * (s - root), s, "symplectic_eigenvalues");
    if (nu_minus < 1.0 - 1e-6 * std::max(1.0, nu_plus)) {
        throw UnphysicalState("symplectic_eigenvalues: nu_minus = " +
                              std::to_string(nu_minus) + " below 1");
    }
    nu_minus = std::max(nu_minus, 1.0);
    return {nu_plus, nu_minus};
}

LogNegativity log_negativity(const Mat4& v) {
    // Partial transpose flips the sign of det C; everything else enters
    // through local invariants, so work directly with the 1/2-convention
    // determinants.
    const double det_a = v.block<2, 2>(0, 0).determinant();
    const double det_b = v.block<2, 2>(2, 2).determinant();
    const double det_c = v.block<2, 2>(0, 2).determinant();
    const double det_v = v.determinant();
    const double s = det_a + det_b - 2.0 * det_c;
    const double root = guarded_sqrt(s * s - 4.0 * det_v, s * s, "log_negativity");
    const double nu2 = 0.5 * (s - root);
    LogNegativity out;
    out.nu_tilde_minus = guarded_sqrt(nu2, s, "log_negativity");
    if (out.nu_tilde_minus <= 0.0) {
        throw UnphysicalState("log_negativity: partial-transpose spectrum collapsed to 0");
    }
    out.e = -std::log(2.0 * out.nu_tilde_minus);
    out.e_n = std::max(0.0, out.e);
    return out;
}

double f_function(double x, LogBase base) {
    // Arguments reach this through sqrt of near-cancelling invariants, which
    // carries ~sqrt(eps)-level noise for near-pure states; the clamp width
    // matches the 1e-6 guards used by the eigenvalue routines above.
    if (!(x >= 1.0 - 1e-6)) {
        throw DomainError("f_function: argument " + std::to_string(x) + " below 1");
    }
    if (x <= 1.0) return 0.0;
    const double up = 0.5 * (x + 1.0);
    const double dn = 0.5 * (x - 1.0);
    return up * log_in_base(up, base) - dn * log_in_base(dn, base);
}

double gaussian_discord_raw(const Mat4& v, DiscordMode mode, LogBase base) {
    return discord_impl(v, mode, base).raw;
}

DiscordAudit gaussian_discord_audit(const Mat4& v, DiscordMode mode, LogBase base) {
    return discord_impl(v, mode, base);
}

double gaussian_discord(const Mat4& v, DiscordMode mode, LogBase base) {
    const DiscordAudit a = discord_impl(v, mode, base);
    if (a.raw < 0.0) {
        if (a.raw < -1e-10 * std::max(1.0, a.noise_scale)) {
            throw UnphysicalState("gaussian_discord: negative value " +
                                  std::to_string(a.raw));
        }
        return 0.0;
    }
    return a.raw;
}

double discord_time_average(const std::vector<double>& t,
                            const std::vector<double>& d, double transient_cut) {
    return time_average(t, d, transient_cut);
}

}  // namespace optosync
