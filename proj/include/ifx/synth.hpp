#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ifx/bench.hpp"
#include "ifx/profile.hpp"
#include "ifx/regression.hpp"

namespace ifx::synth {

struct Constant {
  double value = 0.0;
};

/// `before` up to and including t = fraction * duration, `after` beyond.
struct Step {
  double before = 0.0;
  double after = 0.0;
  double fraction = 0.5;
};

/// mean + amplitude * sin(2 pi t / period + phase), clipped to [0, 1].
struct Sinusoid {
  double mean = 0.5;
  double amplitude = 0.0;
  double period_s = 1.0;
  double phase = 0.0;
};

using Shape = std::variant<Constant, Step, Sinusoid>;

/// Value of a shape at t for an application lasting `duration_s`.
double shape_value(const Shape& shape, double t, double duration_s);

struct AppSpec {
  std::string name;
  std::array<Shape, 4> shapes;
  double duration_s = 0.0;
  double sampling_period_s = 0.0;
  std::uint64_t seed = 0;
  double jitter = 0.0;                        // sd of noise added to each knot
  double instructions_per_second = 1e9;       // for synthetic boundaries
};

struct GroundTruth {
  std::array<double, kModelTerms> beta{};
  double noise_sigma = 0.0;
};

/// Samples each shape at the knots i * s_A, i = 1..ceil(T / s_A). Throws
/// DataError for shape parameters that leave [0, 1] (constants, step
/// levels, sinusoid mean) or for a non-positive duration or period.
InterferenceProfile gen_profile(const AppSpec& spec);

/// Synthetic co-run of `app` next to `co_runner`: per interval
/// delta = max(1, truth . regressors(t)) + N(0, sigma), then tau as the
/// running sum of delta * s_A. Deltas are kept positive. Once the
/// co-runner has finished its terms contribute nothing, as in prediction.
ObservationColumn simulate_cosched(const InterferenceProfile& app,
                                   const InterferenceProfile& co_runner, const GroundTruth& truth,
                                   std::uint64_t seed);

/// Archetypes: CPU-bound (index 1 near one), I/O heavy (high cache-miss
/// index), memory-bandwidth heavy (high memory-hierarchy index) and a
/// phased workflow with periodic behaviour.
AppSpec cpu_bound_app(std::string name, double duration_s, double sampling_period_s);
AppSpec io_heavy_app(std::string name, double duration_s, double sampling_period_s);
AppSpec memory_heavy_app(std::string name, double duration_s, double sampling_period_s);
AppSpec phased_app(std::string name, double duration_s, double sampling_period_s,
                   std::uint64_t seed);

}  // namespace ifx::synth
