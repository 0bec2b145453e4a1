#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Dense>

#include "optosync/errors.hpp"
#include "optosync/model.hpp"

namespace optosync {

/// Settings for the adaptive Dormand-Prince 5(4) integrator.
///
/// abs_tol <= 0 selects an automatic absolute tolerance chosen by the caller
/// that knows the natural state scale (e.g. the cavity amplitude eta/kappa).
/// Samples are emitted on the exact grid t0 + k * sample_dt via the 4th-order
/// continuous extension, independent of the internal step sequence.
struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = -1.0;    // <= 0: automatic
    double max_step = 0.5;
    double t_end = 3e4;
    double sample_dt = 0.5;
};

namespace detail {

/// Dormand-Prince 5(4) coefficients, including the dense-output weights.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                            c5 = 8.0 / 9.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                            a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                            a76 = 11.0 / 84.0;
    // b_i - bhat_i, the embedded 4th-order error weights.
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                            e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                            e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    // Shampine's dense-output coefficients.
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0,
                            d7 = 69997945.0 / 29380423.0;
};

}  // namespace detail

/// Integrate dy/dt = rhs(t, y) from t0 to cfg.t_end, calling
/// observer(t_s, y_s) at t_s = t0 + k * sample_dt for k = 0, 1, ...
///
/// rhs:      (double t, const State& y, State& dydt) -> void
/// observer: (double t, const State& y) -> void
/// abs_tol_vec: optional per-component absolute tolerances overriding the
///              scalar abs_tol (used when state blocks live on very
///              different scales).
///
/// Error control uses the scaled RMS norm with scale
///   sc_i = abs_tol_i + rel_tol * max(|y_i|, |y_new_i|)
/// and a PI controller (Hairer's coefficients).  Throws StepSizeUnderflow
/// when no acceptable step exists above roundoff, NonFinite when the state
/// cannot be kept finite.
template <int N, class Rhs, class Observer>
IntegrationStats integrate_adaptive(Rhs&& rhs, Eigen::Matrix<double, N, 1> y,
                                    double t0, const IntegratorConfig& cfg,
                                    Observer&& observer,
                                    const Eigen::Matrix<double, N, 1>* abs_tol_vec = nullptr) {
    using State = Eigen::Matrix<double, N, 1>;
    using T = detail::Dopri5;

    if (!(cfg.t_end > t0)) throw InvalidParams("integrate: t_end must exceed t0");
    if (!(cfg.sample_dt > 0.0)) throw InvalidParams("integrate: sample_dt must be > 0");
    if (!(cfg.max_step > 0.0)) throw InvalidParams("integrate: max_step must be > 0");
    if (!(cfg.rel_tol > 0.0)) throw InvalidParams("integrate: rel_tol must be > 0");
    if (!y.allFinite()) throw NonFinite("integrate: initial state is not finite");

    const double atol_scalar = cfg.abs_tol > 0.0 ? cfg.abs_tol : cfg.rel_tol;
    State atol;
    if (abs_tol_vec != nullptr) {
        atol = *abs_tol_vec;
    } else {
        atol.setConstant(atol_scalar);
    }

    IntegrationStats stats;

    // Sample grid: index-based so accumulated rounding cannot skip or
    // duplicate a sample.
    const double span = cfg.t_end - t0;
    const auto k_last = static_cast<std::int64_t>(std::floor(span / cfg.sample_dt + 1e-9));
    const double grid_eps = cfg.sample_dt * 1e-9;
    std::int64_t k_next = 0;

    observer(t0, y);
    ++k_next;

    double t = t0;
    State k1;
    rhs(t, y, k1);
    ++stats.rhs_evaluations;
    if (!k1.allFinite()) throw NonFinite("integrate: rhs not finite at t0");

    double h = std::min({1e-3, cfg.max_step, span});
    const double safe = 0.9, fac_shrink = 0.2, fac_grow = 10.0;
    const double beta = 0.04, expo1 = 0.2 - beta * 0.75;
    double facold = 1e-4;
    bool last_rejected = false;
    bool last_reject_nonfinite = false;

    State k2, k3, k4, k5, k6, k7, y_new, err, ytmp;

    while (t < cfg.t_end - grid_eps) {
        h = std::min({h, cfg.max_step, cfg.t_end - t});
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
            if (last_reject_nonfinite) {
                throw NonFinite("integrate: state diverged (non-finite at t = " +
                                std::to_string(t) + ")");
            }
            throw StepSizeUnderflow("integrate: step size underflow at t = " +
                                    std::to_string(t));
        }

        ytmp = y + h * (T::a21 * k1);
        rhs(t + T::c2 * h, ytmp, k2);
        ytmp = y + h * (T::a31 * k1 + T::a32 * k2);
        rhs(t + T::c3 * h, ytmp, k3);
        ytmp = y + h * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3);
        rhs(t + T::c4 * h, ytmp, k4);
        ytmp = y + h * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4);
        rhs(t + T::c5 * h, ytmp, k5);
        ytmp = y + h * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5);
        rhs(t + h, ytmp, k6);
        y_new = y + h * (T::a71 * k1 + T::a73 * k3 + T::a74 * k4 + T::a75 * k5 + T::a76 * k6);
        rhs(t + h, y_new, k7);  // FSAL stage
        stats.rhs_evaluations += 6;

        err = h * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);

        double err_norm;
        const bool finite = y_new.allFinite() && err.allFinite();
        if (finite) {
            double acc = 0.0;
            for (int i = 0; i < N; ++i) {
                const double sc =
                    atol[i] + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
                const double q = err[i] / sc;
                acc += q * q;
            }
            err_norm = std::sqrt(acc / N);
        } else {
            err_norm = std::numeric_limits<double>::infinity();
        }

        if (err_norm <= 1.0) {
            // Accepted: emit any grid samples inside (t, t + h] from the
            // quartic continuous extension.
            const double t_new = t + h;
            if (k_next <= k_last && t0 + static_cast<double>(k_next) * cfg.sample_dt <=
                                        t_new + grid_eps) {
                const State rcont1 = y;
                const State rcont2 = y_new - y;
                const State rcont3 = h * k1 - rcont2;
                const State rcont4 = rcont2 - h * k7 - rcont3;
                const State rcont5 = h * (T::d1 * k1 + T::d3 * k3 + T::d4 * k4 +
                                          T::d5 * k5 + T::d6 * k6 + T::d7 * k7);
                while (k_next <= k_last) {
                    const double ts = t0 + static_cast<double>(k_next) * cfg.sample_dt;
                    if (ts > t_new + grid_eps) break;
                    const double theta = std::clamp((ts - t) / h, 0.0, 1.0);
                    const State ys =
                        rcont1 + theta * (rcont2 + (1.0 - theta) *
                                                       (rcont3 + theta * (rcont4 +
                                                        (1.0 - theta) * rcont5)));
                    observer(ts, ys);
                    ++k_next;
                }
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            ++stats.steps_accepted;

            const double fac11 = std::pow(std::max(err_norm, 1e-32), expo1);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::clamp(fac / safe, 1.0 / fac_grow, 1.0 / fac_shrink);
            double h_new = h / fac;
            if (last_rejected) h_new = std::min(h_new, h);
            h = h_new;
            facold = std::max(err_norm, 1e-4);
            last_rejected = false;
            last_reject_nonfinite = false;
        } else {
            ++stats.steps_rejected;
            last_rejected = true;
            if (!finite) {
                last_reject_nonfinite = true;
                h *= 0.25;
            } else {
                const double fac11 = std::pow(err_norm, expo1);
                h = h / std::min(1.0 / fac_shrink, fac11 / safe);
            }
        }
    }
    return stats;
}

}  // namespace optosync
