#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "optosync/classical.hpp"
#include "optosync/correlations.hpp"
#include "optosync/model.hpp"
#include "optosync/quantum.hpp"
#include "optosync/sweep.hpp"
#include "optosync/version.hpp"

namespace py = pybind11;
using namespace optosync;

namespace {

/// Flat, numpy-friendly view of one full run.
struct RunResult {
    Eigen::VectorXd t;
    Eigen::MatrixXd states;     // n x 6: q1 p1 q2 p2 a_re a_im
    Eigen::VectorXd dphi;       // nan before phase lock-on
    Eigen::VectorXd phase_var;  // nan where undefined / classical-only
    Eigen::VectorXd e;
    Eigen::VectorXd discord_a;
    Eigen::VectorXd discord_b;
    SyncMetrics metrics;
    bool quantum = false;
};

RunResult run_py(const SystemParams& params, const IntegratorConfig& integrator,
                 const AnalysisConfig& analysis, const OutputSet& outputs,
                 const ClassicalState& init) {
    RunSeries series;
    const PointResult r =
        run_point(params, integrator, analysis, outputs, init, &series);

    const auto n = static_cast<Eigen::Index>(series.traj.t.size());
    RunResult out;
    out.quantum = outputs.quantum();
    out.metrics = r.metrics;
    out.t.resize(n);
    out.states.resize(n, 6);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.dphi = Eigen::VectorXd::Constant(n, nan);
    out.phase_var = Eigen::VectorXd::Constant(n, nan);
    out.e = Eigen::VectorXd::Constant(n, nan);
    out.discord_a = Eigen::VectorXd::Constant(n, nan);
    out.discord_b = Eigen::VectorXd::Constant(n, nan);

    for (Eigen::Index i = 0; i < n; ++i) {
        out.t[i] = series.traj.t[static_cast<std::size_t>(i)];
        out.states.row(i) =
            series.traj.states[static_cast<std::size_t>(i)].to_vec().transpose();
    }
    for (std::size_t k = 0; k < series.phases.t.size(); ++k) {
        out.dphi[static_cast<Eigen::Index>(series.phases.first_index + k)] =
            series.phases.dphi[k];
    }
    for (std::size_t k = 0; k < series.variance.index.size(); ++k) {
        out.phase_var[static_cast<Eigen::Index>(series.variance.index[k])] =
            series.variance.var[k];
    }
    for (std::size_t k = 0; k < series.e.size(); ++k) {
        out.e[static_cast<Eigen::Index>(k)] = series.e[k];
    }
    for (std::size_t k = 0; k < series.discord_a.size(); ++k) {
        out.discord_a[static_cast<Eigen::Index>(k)] = series.discord_a[k];
        out.discord_b[static_cast<Eigen::Index>(k)] = series.discord_b[k];
    }
    return out;
}

LogBase base_from_string(const std::string& s) {
    if (s == "ten" || s == "10") return LogBase::ten;
    if (s == "two" || s == "2") return LogBase::two;
    if (s == "natural" || s == "e") return LogBase::natural;
    throw py::value_error("base must be 'ten', 'two' or 'natural'");
}

DiscordMode mode_from_string(const std::string& s) {
    if (s == "a" || s == "A") return DiscordMode::a;
    if (s == "b" || s == "B") return DiscordMode::b;
    throw py::value_error("mode must be 'a' or 'b'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two optomechanical membranes coupled to a driven cavity mode";
    m.attr("__version__") = k_version;

    py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init<>())
        .def_readwrite("delta", &SystemParams::delta)
        .def_readwrite("kappa", &SystemParams::kappa)
        .def_readwrite("omega", &SystemParams::omega)
        .def_readwrite("gamma", &SystemParams::gamma)
        .def_readwrite("g", &SystemParams::g)
        .def_readwrite("eta", &SystemParams::eta)
        .def_readwrite("omega1_hz", &SystemParams::omega1_hz)
        .def_readwrite("temperature", &SystemParams::temperature);

    py::class_<ClassicalState>(m, "ClassicalState")
        .def(py::init<>())
        .def_readwrite("q", &ClassicalState::q)
        .def_readwrite("p", &ClassicalState::p)
        .def_readwrite("a_re", &ClassicalState::a_re)
        .def_readwrite("a_im", &ClassicalState::a_im)
        .def("photon_number", &ClassicalState::photon_number);

    py::class_<IntegratorConfig>(m, "IntegratorConfig")
        .def(py::init<>())
        .def_readwrite("rel_tol", &IntegratorConfig::rel_tol)
        .def_readwrite("abs_tol", &IntegratorConfig::abs_tol)
        .def_readwrite("max_step", &IntegratorConfig::max_step)
        .def_readwrite("t_end", &IntegratorConfig::t_end)
        .def_readwrite("sample_dt", &IntegratorConfig::sample_dt);

    py::class_<AnalysisConfig>(m, "AnalysisConfig")
        .def(py::init<>())
        .def_readwrite("transient_cut", &AnalysisConfig::transient_cut)
        .def_readwrite("window_fraction", &AnalysisConfig::window_fraction)
        .def_readwrite("amp_threshold", &AnalysisConfig::amp_threshold)
        .def_readwrite("drift_threshold", &AnalysisConfig::drift_threshold)
        .def_readwrite("n_min", &AnalysisConfig::n_min);

    py::class_<OutputSet>(m, "OutputSet")
        .def(py::init<>())
        .def_readwrite("phase", &OutputSet::phase)
        .def_readwrite("variance", &OutputSet::variance)
        .def_readwrite("discord", &OutputSet::discord)
        .def_readwrite("negativity", &OutputSet::negativity);

    py::class_<SyncMetrics>(m, "SyncMetrics")
        .def_readonly("phi_stat", &SyncMetrics::phi_stat)
        .def_readonly("phi_amp", &SyncMetrics::phi_amp)
        .def_readonly("drift", &SyncMetrics::drift)
        .def_readonly("synchronized", &SyncMetrics::synchronized)
        .def_readonly("var_avg", &SyncMetrics::var_avg)
        .def_readonly("discord_a_avg", &SyncMetrics::discord_a_avg)
        .def_readonly("discord_b_avg", &SyncMetrics::discord_b_avg)
        .def_readonly("e_max", &SyncMetrics::e_max)
        .def_readonly("negativity", &SyncMetrics::negativity);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("t", &RunResult::t)
        .def_readonly("states", &RunResult::states)
        .def_readonly("dphi", &RunResult::dphi)
        .def_readonly("phase_var", &RunResult::phase_var)
        .def_readonly("e", &RunResult::e)
        .def_readonly("discord_a", &RunResult::discord_a)
        .def_readonly("discord_b", &RunResult::discord_b)
        .def_readonly("metrics", &RunResult::metrics)
        .def_readonly("quantum", &RunResult::quantum);

    m.def("thermal_occupation", &thermal_occupation, py::arg("omega_rad_s"),
          py::arg("temp_kelvin"),
          "Bose occupation of a bath mode at the given frequency and temperature");

    m.def("drift_matrix", &drift_matrix, py::arg("state"), py::arg("params"),
          "Drift matrix of the linearized fluctuations around a mean-field state");

    m.def("initial_cm", &initial_cm, py::arg("params"),
          "Covariance matrix of the initial thermal-product state");

    m.def(
        "run",
        [](const SystemParams& params, const IntegratorConfig& integrator,
           const AnalysisConfig& analysis, const OutputSet& outputs,
           const ClassicalState& init) {
            return run_py(params, integrator, analysis, outputs, init);
        },
        py::arg("params") = SystemParams{}, py::arg("integrator") = IntegratorConfig{},
        py::arg("analysis") = AnalysisConfig{}, py::arg("outputs") = OutputSet{},
        py::arg("init") = ClassicalState{{1.0, 1.0}, {0.0, 0.0}, 0.0, 0.0},
        "Integrate one parameter point and return the sampled series plus metrics");

    m.def(
        "log_negativity",
        [](const Mat4& v) {
            const LogNegativity r = log_negativity(v);
            return py::make_tuple(r.e, r.e_n);
        },
        py::arg("reduced_cm"),
        "Entanglement exponent e and logarithmic negativity max(0, e) of a "
        "two-mode covariance matrix (1/2 convention)");

    m.def(
        "gaussian_discord",
        [](const Mat4& v, const std::string& mode, const std::string& base) {
            return gaussian_discord(v, mode_from_string(mode), base_from_string(base));
        },
        py::arg("reduced_cm"), py::arg("mode") = "b", py::arg("base") = "ten",
        "Gaussian discord with the measurement on the given mode");

    m.def(
        "symplectic_eigenvalues",
        [](const Mat4& v) {
            const auto [plus, minus] = symplectic_eigenvalues(v);
            return py::make_tuple(plus, minus);
        },
        py::arg("reduced_cm"),
        "Symplectic spectrum (nu_plus, nu_minus) of sigma = 2 V");

    m.def(
        "f_function",
        [](double x, const std::string& base) {
            return f_function(x, base_from_string(base));
        },
        py::arg("x"), py::arg("base") = "ten", "Entropic kernel f(x) for x >= 1");

    m.def(
        "find_threshold_eta",
        [](const SystemParams& params, double lo, double hi, double tol,
           const std::string& predicate, const IntegratorConfig& integrator,
           const AnalysisConfig& analysis) {
            SweepSpec spec;
            spec.base = params;
            spec.axis = SweepAxis::eta;
            spec.values = {lo, hi};
            spec.integrator = integrator;
            spec.analysis = analysis;
            ThresholdPredicate pred;
            if (predicate == "synchronized") {
                pred = ThresholdPredicate::synchronized;
            } else if (predicate == "phase_near_pi") {
                pred = ThresholdPredicate::phase_near_pi;
            } else {
                throw py::value_error("predicate must be 'synchronized' or 'phase_near_pi'");
            }
            const ThresholdResult r = find_threshold(spec, pred, tol);
            return r.value;
        },
        py::arg("params") = SystemParams{}, py::arg("lo") = 200.0, py::arg("hi") = 3600.0,
        py::arg("tol") = 5.0, py::arg("predicate") = "synchronized",
        py::arg("integrator") = IntegratorConfig{}, py::arg("analysis") = AnalysisConfig{},
        "Bisect the drive amplitude for a synchronization transition");
}
