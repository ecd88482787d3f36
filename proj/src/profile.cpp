#include "ifx/profile.hpp"

#include <algorithm>
#include <cmath>

#include "ifx/errors.hpp"

namespace ifx {

std::size_t interval_count(double span, double step) {
  if (!(step > 0.0)) throw DataError("step must be positive");
  const double ratio = span / step;
  const double c = std::ceil(ratio - 1e-9 * std::max(1.0, ratio));
  return static_cast<std::size_t>(std::max(1.0, c));
}

InterferenceProfile make_profile(const IndexTrace& trace, const RawTrace& raw) {
  if (trace.rows.size() != raw.samples.size()) {
    throw DataError("index trace has " + std::to_string(trace.rows.size()) +
                    " rows but raw trace has " + std::to_string(raw.samples.size()) +
                    " windows");
  }
  InterferenceProfile p;
  p.app_name = trace.app_name;
  p.sampling_period_s = raw.sampling_period_s;
  p.total_time_s = raw.total_time_s;
  p.y.reserve(trace.rows.size());
  for (const auto& r : trace.rows) p.y.push_back(r.as_array());
  p.instructions = cumulative_instructions(raw);
  validate_profile(p);
  return p;
}

void validate_profile(const InterferenceProfile& p) {
  if (p.y.empty()) throw DataError("profile '" + p.app_name + "' has no samples");
  if (!(p.sampling_period_s > 0.0)) throw DataError("profile sampling period must be positive");
  if (!(p.total_time_s > 0.0)) throw DataError("profile total time must be positive");
  for (const auto& row : p.y) {
    for (const double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) throw DataError("profile values must lie in [0, 1]");
    }
  }
  if (!p.instructions.empty() && p.instructions.size() != p.y.size()) {
    throw DataError("profile instruction boundaries do not match its sample count");
  }
  if (!std::is_sorted(p.instructions.begin(), p.instructions.end())) {
    throw DataError("profile instruction boundaries must be non-decreasing");
  }
}

std::array<double, 4> eval_profile_all(const InterferenceProfile& p, double t) {
  const std::size_t n = p.y.size();
  const double s = p.sampling_period_s;
  if (n == 0) throw DataError("empty profile");
  if (!(t > s) || n == 1) return p.y.front();
  if (t >= static_cast<double>(n) * s) return p.y.back();
  // Knot k (0-based) at (k + 1) * s.
  double pos = t / s - 1.0;
  // Snap to a knot when t is a knot time up to rounding of k * s.
  if (const double r = std::round(pos); std::fabs(pos - r) <= 1e-9 * std::max(1.0, r)) pos = r;
  auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo >= n - 1) lo = n - 2;
  const double w = std::clamp(pos - static_cast<double>(lo), 0.0, 1.0);
  std::array<double, 4> out{};
  for (std::size_t j = 0; j < 4; ++j) {
    const double a = p.y[lo][j];
    const double b = p.y[lo + 1][j];
    // Exact at the knots, bounded by the adjacent values in between.
    out[j] = w == 0.0 ? a : (w == 1.0 ? b : std::clamp(a + w * (b - a), std::min(a, b), std::max(a, b)));
  }
  return out;
}

double eval_profile(const InterferenceProfile& p, int index, double t) {
  if (index < 1 || index > 4) throw DataError("profile index must be in 1..4");
  return eval_profile_all(p, t)[static_cast<std::size_t>(index - 1)];
}

InterferenceProfile resample(const InterferenceProfile& p, double new_period_s) {
  if (!(new_period_s > 0.0)) throw DataError("resample period must be positive");
  validate_profile(p);
  const std::size_t n = interval_count(p.span_s(), new_period_s);
  InterferenceProfile out;
  out.app_name = p.app_name;
  out.sampling_period_s = new_period_s;
  out.total_time_s = p.total_time_s;
  out.y.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    out.y.push_back(eval_profile_all(p, static_cast<double>(k) * new_period_s));
  }
  if (!p.instructions.empty()) {
    // Piecewise linear cumulative instructions through (0, 0) and the knots.
    out.instructions.reserve(n);
    const double s = p.sampling_period_s;
    for (std::size_t k = 1; k <= n; ++k) {
      const double t = std::min(static_cast<double>(k) * new_period_s, p.span_s());
      const double pos = t / s;
      auto hi = static_cast<std::size_t>(std::ceil(pos - 1e-12));
      hi = std::clamp<std::size_t>(hi, 1, p.instructions.size());
      const double lo_count = hi >= 2 ? static_cast<double>(p.instructions[hi - 2]) : 0.0;
      const double hi_count = static_cast<double>(p.instructions[hi - 1]);
      const double w = std::clamp(pos - static_cast<double>(hi - 1), 0.0, 1.0);
      const auto value = static_cast<std::uint64_t>(std::llround(lo_count + w * (hi_count - lo_count)));
      const std::uint64_t prev = out.instructions.empty() ? 0 : out.instructions.back();
      out.instructions.push_back(std::max(value, prev));
    }
  }
  return out;
}

}  // namespace ifx
