#include "optosync/model.hpp"

#include <cmath>
#include <complex>
#include <sstream>

namespace optosync {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParams("invalid parameters: " + what);
}

}  // namespace

SystemParams validate(const SystemParams& p) {
    require(std::isfinite(p.delta), "delta must be finite");
    require(std::isfinite(p.kappa) && p.kappa > 0.0, "kappa must be > 0");
    require(std::isfinite(p.eta) && p.eta >= 0.0, "eta must be >= 0");
    require(std::isfinite(p.omega1_hz) && p.omega1_hz > 0.0, "omega1_hz must be > 0");
    for (int j = 0; j < 2; ++j) {
        const std::string tag = std::to_string(j + 1);
        require(std::isfinite(p.omega[j]) && p.omega[j] > 0.0, "omega" + tag + " must be > 0");
        require(std::isfinite(p.gamma[j]) && p.gamma[j] > 0.0, "gamma" + tag + " must be > 0");
        require(std::isfinite(p.g[j]) && p.g[j] >= 0.0, "g" + tag + " must be >= 0");
        require(std::isfinite(p.temperature[j]) && p.temperature[j] >= 0.0,
                "temperature" + tag + " must be >= 0");
    }
    return p;
}

std::vector<std::string> validation_warnings(const SystemParams& p) {
    std::vector<std::string> notes;
    for (int j = 0; j < 2; ++j) {
        if (p.gamma[j] >= 0.1 * p.omega[j]) {
            notes.push_back("membrane " + std::to_string(j + 1) +
                            " is not underdamped (gamma/omega >= 0.1)");
        }
    }
    if (p.kappa >= 1.0) {
        notes.push_back("cavity linewidth exceeds omega_1; sideband arguments break down");
    }
    if (p.delta <= 0.0) {
        notes.push_back("non-positive detuning: the drive does not anti-damp the membranes");
    }
    return notes;
}

double thermal_occupation(double omega_rad_s, double temp_kelvin) {
    if (!(omega_rad_s > 0.0) || !std::isfinite(omega_rad_s)) {
        throw InvalidParams("thermal_occupation: omega must be > 0");
    }
    if (!(temp_kelvin >= 0.0) || !std::isfinite(temp_kelvin)) {
        throw InvalidParams("thermal_occupation: temperature must be >= 0");
    }
    if (temp_kelvin == 0.0) return 0.0;
    const double x = k_hbar * omega_rad_s / (k_boltzmann * temp_kelvin);
    // expm1 keeps full precision in the Rayleigh-Jeans regime x << 1.
    return 1.0 / std::expm1(x);
}

Mat6 symplectic_form6() {
    Mat6 omega = Mat6::Zero();
    for (int m = 0; m < 3; ++m) {
        omega(2 * m, 2 * m + 1) = 1.0;
        omega(2 * m + 1, 2 * m) = -1.0;
    }
    return omega;
}

double physicality_margin(const Mat6& v) {
    using CMat6 = Eigen::Matrix<std::complex<double>, 6, 6>;
    static const Mat6 omega = symplectic_form6();
    CMat6 h = v.cast<std::complex<double>>();
    h += std::complex<double>(0.0, 0.5) * omega.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<CMat6> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool is_physical(const Mat6& v, double tol_rel) {
    return physicality_margin(v) >= -tol_rel * std::max(1.0, v.norm());
}

}  // namespace optosync
