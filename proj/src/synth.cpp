#include "ifx/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ifx/errors.hpp"

namespace ifx::synth {
namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

void check_shape(const Shape& shape) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Constant>) {
          if (!in_unit(s.value)) throw DataError("constant shape outside [0, 1]");
        } else if constexpr (std::is_same_v<T, Step>) {
          if (!in_unit(s.before) || !in_unit(s.after)) throw DataError("step levels outside [0, 1]");
          if (!in_unit(s.fraction)) throw DataError("step fraction outside [0, 1]");
        } else {
          if (!in_unit(s.mean)) throw DataError("sinusoid mean outside [0, 1]");
          if (!(s.amplitude >= 0.0)) throw DataError("sinusoid amplitude must be non-negative");
          if (!(s.period_s > 0.0)) throw DataError("sinusoid period must be positive");
        }
      },
      shape);
}

}  // namespace

double shape_value(const Shape& shape, double t, double duration_s) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return s.value;
        } else if constexpr (std::is_same_v<T, Step>) {
          return t <= s.fraction * duration_s ? s.before : s.after;
        } else {
          const double v =
              s.mean + s.amplitude * std::sin(2.0 * std::numbers::pi * t / s.period_s + s.phase);
          return std::clamp(v, 0.0, 1.0);
        }
      },
      shape);
}

InterferenceProfile gen_profile(const AppSpec& spec) {
  if (!(spec.duration_s > 0.0)) throw DataError("synthetic duration must be positive");
  if (!(spec.sampling_period_s > 0.0)) throw DataError("synthetic sampling period must be positive");
  if (!(spec.jitter >= 0.0)) throw DataError("jitter must be non-negative");
  for (const auto& s : spec.shapes) check_shape(s);
  const std::size_t n = interval_count(spec.duration_s, spec.sampling_period_s);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  InterferenceProfile p;
  p.app_name = spec.name;
  p.sampling_period_s = spec.sampling_period_s;
  p.total_time_s = spec.duration_s;
  p.y.reserve(n);
  p.instructions.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) * spec.sampling_period_s;
    std::array<double, 4> row{};
    for (std::size_t j = 0; j < 4; ++j) {
      double v = shape_value(spec.shapes[j], t, spec.duration_s);
      if (spec.jitter > 0.0) v = std::clamp(v + spec.jitter * noise(rng), 0.0, 1.0);
      row[j] = v;
    }
    p.y.push_back(row);
    const double ti = std::min(t, spec.duration_s);
    p.instructions.push_back(static_cast<std::uint64_t>(std::llround(ti * spec.instructions_per_second)));
  }
  return p;
}

ObservationColumn simulate_cosched(const InterferenceProfile& app,
                                   const InterferenceProfile& co_runner, const GroundTruth& truth,
                                   std::uint64_t seed) {
  if (!(truth.noise_sigma >= 0.0)) throw DataError("noise sigma must be non-negative");
  for (const double b : truth.beta) {
    if (!(b >= 0.0)) throw DataError("ground-truth coefficients must be non-negative");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double s = app.sampling_period_s;
  const std::size_t n = interval_count(app.total_time_s, s);
  ObservationColumn col;
  col.co_runner = co_runner.app_name;
  col.tau.reserve(n);
  col.delta.reserve(n);
  double tau = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) * s;
    auto row = regressor_row(app, co_runner, t);
    if (t > co_runner.total_time_s) row.tail(4).setZero();
    double d = 0.0;
    for (int k = 0; k < kModelTerms; ++k) d += truth.beta[static_cast<std::size_t>(k)] * row(k);
    d = std::max(1.0, d);
    if (truth.noise_sigma > 0.0) d = std::max(1e-3, d + truth.noise_sigma * noise(rng));
    tau += d * s;
    col.delta.push_back(d);
    col.tau.push_back(tau);
  }
  col.co_run_time_s = tau;
  return col;
}

AppSpec cpu_bound_app(std::string name, double duration_s, double sampling_period_s) {
  AppSpec a;
  a.name = std::move(name);
  a.duration_s = duration_s;
  a.sampling_period_s = sampling_period_s;
  a.shapes = {Constant{0.98}, Constant{0.2}, Sinusoid{0.3, 0.05, 37.0, 0.0}, Constant{0.25}};
  return a;
}

AppSpec io_heavy_app(std::string name, double duration_s, double sampling_period_s) {
  AppSpec a;
  a.name = std::move(name);
  a.duration_s = duration_s;
  a.sampling_period_s = sampling_period_s;
  a.shapes = {Constant{0.25}, Sinusoid{0.6, 0.2, 53.0, 1.0}, Constant{0.35}, Constant{0.85}};
  return a;
}

AppSpec memory_heavy_app(std::string name, double duration_s, double sampling_period_s) {
  AppSpec a;
  a.name = std::move(name);
  a.duration_s = duration_s;
  a.sampling_period_s = sampling_period_s;
  a.shapes = {Constant{0.5}, Constant{0.3}, Sinusoid{0.85, 0.1, 29.0, 2.0}, Constant{0.6}};
  return a;
}

AppSpec phased_app(std::string name, double duration_s, double sampling_period_s,
                   std::uint64_t seed) {
  AppSpec a;
  a.name = std::move(name);
  a.duration_s = duration_s;
  a.sampling_period_s = sampling_period_s;
  a.seed = seed;
  a.jitter = 0.03;
  a.shapes = {Sinusoid{0.5, 0.4, 60.0, 0.0}, Step{0.2, 0.7, 0.4},
              Sinusoid{0.45, 0.35, 45.0, 0.7}, Sinusoid{0.5, 0.3, 25.0, 1.9}};
  return a;
}

}  // namespace ifx::synth
