#pragma once

#include <span>
#include <vector>

#include "ifx/profile.hpp"
#include "ifx/regression.hpp"

namespace ifx {

struct Prediction {
  std::vector<double> delta_hat;  // per interval, each >= 1
  double total_time_s = 0.0;      // sum of delta_hat * step
  double sampling_period_s = 0.0; // prediction step
  int delay_k = 0;
};

/// Linear interference estimate at t, floored at 1.0. Both profiles are
/// evaluated at the same instant.
double estimate_delta(const InterferenceModel& model, const InterferenceProfile& app,
                      const InterferenceProfile& co_runner, double t);

/// Estimated co-scheduled execution time of `app` next to `co_runner`.
/// With delay_k > 0 the application starts once the co-runner has reached
/// its k-th interval, so the co-runner is evaluated at t + k * s_B. Once
/// the co-runner has finished (past its total time) its indices contribute
/// nothing. Intervals: ceil(T_A / s_A), evaluated at their upper bounds.
Prediction estimate_execution_time(const InterferenceModel& model,
                                   const InterferenceProfile& app,
                                   const InterferenceProfile& co_runner, int delay_k = 0);

/// Same, stepping through the application's lifetime with `step_s`
/// instead of its own sampling period.
Prediction estimate_execution_time_with_step(const InterferenceModel& model,
                                             const InterferenceProfile& app,
                                             const InterferenceProfile& co_runner,
                                             double step_s, int delay_k = 0);

enum class SamplingScenario {
  kCoarsePrediction = 1,  // keep profiles, coarsen only the prediction step
  kCoarseProfiles = 2,    // resample both profiles to the step first
};

struct SensitivityRow {
  std::size_t n = 0;
  double period_s = 0.0;
  double estimate_s = 0.0;
};

/// One row per period, in the order given. Throws DataError on a
/// non-positive period.
std::vector<SensitivityRow> sampling_sensitivity(const InterferenceModel& model,
                                                 const InterferenceProfile& app,
                                                 const InterferenceProfile& co_runner,
                                                 std::span<const double> periods,
                                                 SamplingScenario scenario);

}  // namespace ifx
