#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ifx/indices.hpp"
#include "ifx/trace.hpp"

namespace ifx {

/// Sampled interference indices of one application run. Knot i (1-based)
/// sits at t = i * sampling_period_s; between knots the profile is the
/// linear interpolant of adjacent rows.
struct InterferenceProfile {
  std::string app_name;
  double sampling_period_s = 0.0;
  std::vector<std::array<double, 4>> y;
  double total_time_s = 0.0;
  std::vector<std::uint64_t> instructions;  // cumulative count at each knot

  std::size_t size() const noexcept { return y.size(); }
  double knot_time(std::size_t one_based) const {
    return static_cast<double>(one_based) * sampling_period_s;
  }
  /// Time of the last knot, n * s_A.
  double span_s() const { return knot_time(y.size()); }
};

/// Throws DataError if the index trace and raw trace lengths differ.
InterferenceProfile make_profile(const IndexTrace& trace, const RawTrace& raw);

/// Throws DataError unless the profile satisfies its invariants.
void validate_profile(const InterferenceProfile& p);

/// f_j(t) for index j in 1..4. Clamps to the first row before the first
/// knot and to the last row after the last one.
double eval_profile(const InterferenceProfile& p, int index, double t);

/// All four indices at t.
std::array<double, 4> eval_profile_all(const InterferenceProfile& p, double t);

/// Samples the profile at multiples of `new_period_s` covering the same
/// knot span (ceil(n * s_A / new_period_s) knots). Instruction boundaries
/// are interpolated from the cumulative counts, starting at 0 when t = 0.
InterferenceProfile resample(const InterferenceProfile& p, double new_period_s);

/// ceil(span / step) with a relative tolerance so exact multiples do not
/// pick up an extra interval from rounding.
std::size_t interval_count(double span, double step);

}  // namespace ifx
