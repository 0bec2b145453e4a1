#pragma once

#include <filesystem>
#include <string>

#include "optosync/sweep.hpp"

namespace optosync::cli {

/// Write `content` to `path` atomically (temp file + rename) so readers
/// never observe a half-written file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Per-sample series of one run.  Columns (fixed order):
///   t,q1,p1,q2,p2,|a|^2,dphi[,phase_var,E,discord_A,discord_B]
/// The bracketed block appears only for quantum runs.  Samples where a
/// series is not defined (e.g. dphi before phase lock-on) hold nan.
std::string render_trajectory_csv(const RunSeries& series, bool quantum);

/// One row per sweep point.  Columns (fixed order):
///   value,phi_stat,phi_amp,drift,synchronized,var_avg,discord_A_avg,
///   discord_B_avg,E_max,status,steps_accepted,steps_rejected,rhs_evals,
///   phys_margin,t_end_used
/// Metrics that were not requested hold nan.
std::string render_sweep_csv(const SweepResult& result);

/// Single-row threshold report:
///   axis,predicate,value,bracket_lo,bracket_hi,iterations
std::string render_threshold_csv(const SweepSpec& spec, ThresholdPredicate predicate,
                                 const ThresholdResult& result);

/// Format a double with "%.17g" (value-preserving round trip).
std::string csv_double(double x);

}  // namespace optosync::cli
