#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ifx {

struct MachineSpec {
  std::uint32_t cores = 1;
  double cpu_speed_mhz = 0.0;
  std::string label;
};

/// Counter totals for one sampling window of a solo or co-scheduled run.
struct RawSample {
  std::uint64_t window_index = 0;
  double window_seconds = 0.0;
  std::uint64_t cycles = 0;
  std::uint64_t instructions = 0;
  std::uint64_t cache_refs = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t llc_loads = 0;
  std::uint64_t llc_load_misses = 0;
  std::uint64_t llc_stores = 0;
  std::uint64_t llc_store_misses = 0;
  std::uint64_t branches = 0;
  std::uint64_t branch_misses = 0;
  std::uint64_t page_faults = 0;

  bool operator==(const RawSample&) const = default;
};

struct RawTrace {
  std::string app_name;
  MachineSpec machine;
  double sampling_period_s = 0.0;
  std::vector<RawSample> samples;
  double total_time_s = 0.0;
};

enum class Severity { kWarning, kError };

struct Diagnostic {
  Severity severity;
  std::string message;
};

using ValidationReport = std::vector<Diagnostic>;

/// Column order of the trace CSV header row.
inline constexpr std::string_view kTraceCsvHeader =
    "window,seconds,cycles,instructions,cache_refs,cache_misses,llc_loads,"
    "llc_load_misses,llc_stores,llc_store_misses,branches,branch_misses,"
    "page_faults";

/// Parses the trace CSV interchange format. Throws ParseError on malformed
/// rows (with line number) and ValidationError when a sample violates a
/// miss <= reference inequality or the window layout.
RawTrace parse_trace_csv(std::string_view text);

/// Renders a trace in the format accepted by parse_trace_csv. Floating
/// point fields use the shortest round-trip representation.
std::string render_trace_csv(const RawTrace& trace);

/// Checks every RawTrace invariant without throwing. Zero-instruction
/// windows are reported as warnings.
ValidationReport validate_trace(const RawTrace& trace);

/// Lenient scan of CSV text: collects every problem (including negative
/// counts, which cannot be represented in a RawTrace) instead of stopping
/// at the first one.
ValidationReport validate_trace_csv(std::string_view text);

bool has_errors(const ValidationReport& report);

/// Cumulative window end times: entry k is the sum of window_seconds[0..k].
std::vector<double> window_end_times(const RawTrace& trace);

/// Cumulative instruction counts at each window end.
std::vector<std::uint64_t> cumulative_instructions(const RawTrace& trace);

}  // namespace ifx
