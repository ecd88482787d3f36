#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ifx/trace.hpp"

namespace ifx {

/// One point of a co-scheduled run: elapsed seconds and cumulative
/// instructions retired by the application under study.
struct ProgressPoint {
  double time_s = 0.0;
  double instructions = 0.0;
};

/// Interval timing of one application against one co-runner.
struct ObservationColumn {
  std::string co_runner;
  std::vector<double> tau;    // seconds to reach each solo boundary
  std::vector<double> delta;  // per-interval slowdown
  double co_run_time_s = 0.0; // tau.back()
};

/// Interval timings of one application against each benchmark co-runner.
/// Interval k (0-based) ends at solo time (k + 1) * sampling_period_s.
struct BenchmarkObservations {
  std::string app_name;
  double sampling_period_s = 0.0;
  double solo_time_s = 0.0;
  std::vector<ObservationColumn> columns;

  std::size_t intervals() const { return columns.empty() ? 0 : columns.front().tau.size(); }
};

/// Progress points of a co-scheduled trace (window end time, cumulative
/// instructions), starting with (0, 0).
std::vector<ProgressPoint> progress_points(const RawTrace& co_run);

/// For each solo boundary, the earliest time the co-run's cumulative
/// instructions reach it, interpolated linearly between progress points.
/// A point at (0, 0) is implied if the co-run does not start at t = 0.
/// Throws DataError naming the shortfall when the co-run ends before the
/// final boundary.
std::vector<double> align_intervals(std::span<const std::uint64_t> solo_boundaries,
                                    std::span<const ProgressPoint> co_run);

/// delta_0 = tau_0 / s, delta_k = (tau_k - tau_{k-1}) / s. Throws DataError
/// if tau is not strictly increasing or s is not positive.
std::vector<double> interference_deltas(std::span<const double> tau, double sampling_period_s);

/// Longest of the benchmark durations (they run in parallel).
double bench_wait_time(std::span<const double> benchmark_times);

/// Aligns one co-scheduled trace against the solo trace of the same
/// application.
ObservationColumn observe_co_run(const RawTrace& solo, const RawTrace& co_run,
                                 const std::string& co_runner);

/// Builds the observations of `solo` against each named co-run.
BenchmarkObservations build_observations(const RawTrace& solo,
                                         std::span<const RawTrace> co_runs,
                                         std::span<const std::string> co_runner_names);

/// Throws DataError unless columns agree in length, tau increases and
/// deltas are positive.
void validate_observations(const BenchmarkObservations& obs);

}  // namespace ifx
