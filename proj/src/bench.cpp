#include "ifx/bench.hpp"

#include <algorithm>
#include <cmath>

#include "ifx/errors.hpp"

namespace ifx {

std::vector<ProgressPoint> progress_points(const RawTrace& co_run) {
  std::vector<ProgressPoint> out;
  out.reserve(co_run.samples.size() + 1);
  out.push_back({0.0, 0.0});
  const auto times = window_end_times(co_run);
  const auto instr = cumulative_instructions(co_run);
  for (std::size_t k = 0; k < times.size(); ++k) {
    out.push_back({times[k], static_cast<double>(instr[k])});
  }
  return out;
}

std::vector<double> align_intervals(std::span<const std::uint64_t> solo_boundaries,
                                    std::span<const ProgressPoint> co_run) {
  if (co_run.empty()) throw DataError("co-run has no progress points");
  std::vector<ProgressPoint> pts;
  pts.reserve(co_run.size() + 1);
  if (co_run.front().time_s > 0.0) pts.push_back({0.0, 0.0});
  pts.insert(pts.end(), co_run.begin(), co_run.end());
  for (std::size_t k = 1; k < pts.size(); ++k) {
    if (pts[k].time_s < pts[k - 1].time_s || pts[k].instructions < pts[k - 1].instructions) {
      throw DataError("co-run progress must be non-decreasing in time and instructions");
    }
  }
  std::vector<double> tau;
  tau.reserve(solo_boundaries.size());
  std::size_t k = 0;
  for (const auto boundary_count : solo_boundaries) {
    const double boundary = static_cast<double>(boundary_count);
    while (k < pts.size() && pts[k].instructions < boundary) ++k;
    if (k == pts.size()) {
      const double shortfall = boundary - pts.back().instructions;
      throw DataError("co-run ends " + std::to_string(static_cast<long double>(shortfall)) +
                      " instructions short of solo boundary " + std::to_string(tau.size() + 1));
    }
    if (k == 0) {
      tau.push_back(pts[0].time_s);
      continue;
    }
    const auto& a = pts[k - 1];
    const auto& b = pts[k];
    const double w = (boundary - a.instructions) / (b.instructions - a.instructions);
    tau.push_back(a.time_s + w * (b.time_s - a.time_s));
  }
  return tau;
}

std::vector<double> interference_deltas(std::span<const double> tau, double sampling_period_s) {
  if (!(sampling_period_s > 0.0)) throw DataError("sampling period must be positive");
  std::vector<double> delta;
  delta.reserve(tau.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!(tau[i] > prev)) {
      throw DataError("tau must be strictly increasing (interval " + std::to_string(i) + ")");
    }
    delta.push_back((tau[i] - prev) / sampling_period_s);
    prev = tau[i];
  }
  return delta;
}

double bench_wait_time(std::span<const double> benchmark_times) {
  if (benchmark_times.empty()) throw DataError("no benchmark times");
  return *std::max_element(benchmark_times.begin(), benchmark_times.end());
}

ObservationColumn observe_co_run(const RawTrace& solo, const RawTrace& co_run,
                                 const std::string& co_runner) {
  const auto boundaries = cumulative_instructions(solo);
  const auto points = progress_points(co_run);
  ObservationColumn col;
  col.co_runner = co_runner;
  col.tau = align_intervals(boundaries, points);
  col.delta = interference_deltas(col.tau, solo.sampling_period_s);
  col.co_run_time_s = col.tau.back();
  return col;
}

BenchmarkObservations build_observations(const RawTrace& solo,
                                         std::span<const RawTrace> co_runs,
                                         std::span<const std::string> co_runner_names) {
  if (co_runs.size() != co_runner_names.size() || co_runs.empty()) {
    throw DataError("need one name per co-run and at least one co-run");
  }
  BenchmarkObservations obs;
  obs.app_name = solo.app_name;
  obs.sampling_period_s = solo.sampling_period_s;
  obs.solo_time_s = solo.total_time_s;
  for (std::size_t j = 0; j < co_runs.size(); ++j) {
    obs.columns.push_back(observe_co_run(solo, co_runs[j], co_runner_names[j]));
  }
  return obs;
}

void validate_observations(const BenchmarkObservations& obs) {
  if (!(obs.sampling_period_s > 0.0)) throw DataError("observations: sampling period must be positive");
  if (obs.columns.empty()) throw DataError("observations: no co-runner columns");
  const auto n = obs.columns.front().tau.size();
  if (n == 0) throw DataError("observations: no intervals");
  for (const auto& c : obs.columns) {
    if (c.tau.size() != n || c.delta.size() != n) {
      throw DataError("observations: column '" + c.co_runner + "' has inconsistent length");
    }
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(c.tau[i] > prev) || !(c.delta[i] > 0.0)) {
        throw DataError("observations: column '" + c.co_runner +
                        "' must have increasing tau and positive deltas");
      }
      prev = c.tau[i];
    }
  }
}

}  // namespace ifx
