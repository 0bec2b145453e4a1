#include "output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "config.hpp"

namespace optosync::cli {

namespace {

/// Commas inside status text would break the row structure.
std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

}  // namespace

std::string csv_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw SimulationError("cannot open '" + tmp.string() + "' for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out.flush()) {
            throw SimulationError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw SimulationError("cannot move '" + tmp.string() + "' to '" + path.string() +
                              "': " + ec.message());
    }
}

std::string render_trajectory_csv(const RunSeries& series, bool quantum) {
    std::ostringstream out;
    out << "t,q1,p1,q2,p2,|a|^2,dphi";
    if (quantum) out << ",phase_var,E,discord_A,discord_B";
    out << "\n";

    const auto& traj = series.traj;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::size_t n = traj.t.size();

    // Scatter the (possibly shorter) derived series onto the master grid.
    std::vector<double> dphi(n, nan), pvar(n, nan);
    for (std::size_t k = 0; k < series.phases.t.size(); ++k) {
        dphi[series.phases.first_index + k] = series.phases.dphi[k];
    }
    for (std::size_t k = 0; k < series.variance.index.size(); ++k) {
        pvar[series.variance.index[k]] = series.variance.var[k];
    }

    for (std::size_t i = 0; i < n; ++i) {
        const ClassicalState& s = traj.states[i];
        out << csv_double(traj.t[i]) << ',' << csv_double(s.q[0]) << ','
            << csv_double(s.p[0]) << ',' << csv_double(s.q[1]) << ','
            << csv_double(s.p[1]) << ',' << csv_double(s.photon_number()) << ','
            << csv_double(dphi[i]);
        if (quantum) {
            out << ',' << csv_double(pvar[i]) << ','
                << csv_double(i < series.e.size() ? series.e[i] : nan) << ','
                << csv_double(i < series.discord_a.size() ? series.discord_a[i] : nan)
                << ','
                << csv_double(i < series.discord_b.size() ? series.discord_b[i] : nan);
        }
        out << '\n';
    }
    return out.str();
}

std::string render_sweep_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "value,phi_stat,phi_amp,drift,synchronized,var_avg,discord_A_avg,"
           "discord_B_avg,E_max,status,steps_accepted,steps_rejected,rhs_evals,"
           "phys_margin,t_end_used\n";
    for (const PointResult& r : result.points) {
        const SyncMetrics& m = r.metrics;
        out << csv_double(r.value) << ',' << csv_double(m.phi_stat) << ','
            << csv_double(m.phi_amp) << ',' << csv_double(m.drift) << ','
            << (m.synchronized ? 1 : 0) << ',' << csv_double(m.var_avg) << ','
            << csv_double(m.discord_a_avg) << ',' << csv_double(m.discord_b_avg) << ','
            << csv_double(m.e_max) << ',' << sanitize(r.status) << ','
            << r.diag.stats.steps_accepted << ',' << r.diag.stats.steps_rejected << ','
            << r.diag.stats.rhs_evaluations << ',' << csv_double(r.diag.phys_margin_rel)
            << ',' << csv_double(r.diag.t_end_used) << '\n';
    }
    return out.str();
}

std::string render_threshold_csv(const SweepSpec& spec, ThresholdPredicate predicate,
                                 const ThresholdResult& result) {
    std::ostringstream out;
    out << "axis,predicate,value,bracket_lo,bracket_hi,iterations\n";
    out << axis_name(spec.axis) << ',' << predicate_name(predicate) << ','
        << csv_double(result.value) << ',' << csv_double(result.bracket_lo) << ','
        << csv_double(result.bracket_hi) << ',' << result.iterations << '\n';
    return out.str();
}

}  // namespace optosync::cli
