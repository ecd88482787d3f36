#include "ifx/predictor.hpp"

#include <algorithm>

#include "ifx/errors.hpp"

namespace ifx {
namespace {

double linear_delta(const InterferenceModel& model, const std::array<double, 4>& fa,
                    const std::array<double, 4>* fb) {
  double d = model.beta[0];
  for (std::size_t j = 0; j < 4; ++j) {
    d += model.beta[1 + j] * fa[j];
    if (fb) d += model.beta[5 + j] * (*fb)[j];
  }
  return std::max(1.0, d);
}

}  // namespace

double estimate_delta(const InterferenceModel& model, const InterferenceProfile& app,
                      const InterferenceProfile& co_runner, double t) {
  const auto fa = eval_profile_all(app, t);
  const auto fb = eval_profile_all(co_runner, t);
  return linear_delta(model, fa, &fb);
}

Prediction estimate_execution_time_with_step(const InterferenceModel& model,
                                             const InterferenceProfile& app,
                                             const InterferenceProfile& co_runner,
                                             double step_s, int delay_k) {
  if (delay_k < 0) throw DataError("delay must be non-negative");
  if (!(step_s > 0.0)) throw DataError("prediction step must be positive");
  const std::size_t n = interval_count(app.total_time_s, step_s);
  const double offset = static_cast<double>(delay_k) * co_runner.sampling_period_s;
  Prediction out;
  out.sampling_period_s = step_s;
  out.delay_k = delay_k;
  out.delta_hat.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) * step_s;
    const double tb = t + offset;
    const auto fa = eval_profile_all(app, t);
    double d = 0.0;
    if (tb <= co_runner.total_time_s) {
      const auto fb = eval_profile_all(co_runner, tb);
      d = linear_delta(model, fa, &fb);
    } else {
      d = linear_delta(model, fa, nullptr);
    }
    out.delta_hat.push_back(d);
    out.total_time_s += d * step_s;
  }
  return out;
}

Prediction estimate_execution_time(const InterferenceModel& model, const InterferenceProfile& app,
                                   const InterferenceProfile& co_runner, int delay_k) {
  return estimate_execution_time_with_step(model, app, co_runner, app.sampling_period_s, delay_k);
}

std::vector<SensitivityRow> sampling_sensitivity(const InterferenceModel& model,
                                                 const InterferenceProfile& app,
                                                 const InterferenceProfile& co_runner,
                                                 std::span<const double> periods,
                                                 SamplingScenario scenario) {
  std::vector<SensitivityRow> rows;
  rows.reserve(periods.size());
  for (const double s : periods) {
    if (!(s > 0.0)) throw DataError("sampling periods must be positive");
    Prediction p;
    if (scenario == SamplingScenario::kCoarsePrediction) {
      p = estimate_execution_time_with_step(model, app, co_runner, s);
    } else {
      p = estimate_execution_time(model, resample(app, s), resample(co_runner, s));
    }
    rows.push_back({p.delta_hat.size(), s, p.total_time_s});
  }
  return rows;
}

}  // namespace ifx
