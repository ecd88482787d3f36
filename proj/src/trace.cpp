#include "ifx/trace.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "ifx/errors.hpp"
#include "ifx/format.hpp"

namespace ifx {
namespace {

constexpr std::size_t kColumns = 13;
constexpr double kPeriodTolerance = 1e-9;

enum class ProblemKind { kParse, kValidation, kWarning };

using ProblemSink =
    std::function<void(ProblemKind, std::size_t line, const std::string&)>;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Distinguishes the ways an unsigned count can fail to parse.
enum class CountStatus { kOk, kNegative, kOverflow, kInvalid };

CountStatus to_count(std::string_view s, std::uint64_t& out) {
  s = trim(s);
  if (s.empty()) return CountStatus::kInvalid;
  if (s.front() == '-') {
    const auto digits = s.substr(1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string_view::npos)
      return CountStatus::kInvalid;
    return CountStatus::kNegative;
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ptr != s.data() + s.size()) return CountStatus::kInvalid;
  if (ec == std::errc::result_out_of_range) return CountStatus::kOverflow;
  if (ec != std::errc()) return CountStatus::kInvalid;
  return CountStatus::kOk;
}

constexpr std::array<std::string_view, kColumns> kColumnNames = {
    "window",           "seconds",    "cycles",   "instructions", "cache_refs",
    "cache_misses",     "llc_loads",  "llc_load_misses",          "llc_stores",
    "llc_store_misses", "branches",   "branch_misses",            "page_faults"};

void check_sample(const RawSample& s, std::size_t line, const ProblemSink& sink) {
  struct Pair {
    std::uint64_t miss;
    std::uint64_t ref;
    const char* miss_name;
    const char* ref_name;
  };
  const std::array<Pair, 4> pairs = {{
      {s.cache_misses, s.cache_refs, "cache_misses", "cache_refs"},
      {s.llc_load_misses, s.llc_loads, "llc_load_misses", "llc_loads"},
      {s.llc_store_misses, s.llc_stores, "llc_store_misses", "llc_stores"},
      {s.branch_misses, s.branches, "branch_misses", "branches"},
  }};
  for (const auto& p : pairs) {
    if (p.miss > p.ref) {
      sink(ProblemKind::kValidation, line,
           std::string(p.miss_name) + " exceeds " + p.ref_name + " in window " +
               std::to_string(s.window_index));
    }
  }
  if (!(s.window_seconds > 0.0) || !std::isfinite(s.window_seconds)) {
    sink(ProblemKind::kValidation, line,
         "window " + std::to_string(s.window_index) + " has non-positive duration");
  }
  if (s.instructions == 0) {
    sink(ProblemKind::kWarning, line,
         "zero-instruction window " + std::to_string(s.window_index));
  }
}

void check_layout(const RawTrace& t, const std::vector<std::size_t>& lines,
                  const ProblemSink& sink) {
  const auto line_of = [&](std::size_t k) { return k < lines.size() ? lines[k] : 0; };
  if (!(t.sampling_period_s > 0.0) || !std::isfinite(t.sampling_period_s)) {
    sink(ProblemKind::kValidation, 0, "sampling period must be positive");
    return;
  }
  if (t.machine.cores < 1) sink(ProblemKind::kValidation, 0, "cores must be >= 1");
  if (!(t.machine.cpu_speed_mhz > 0.0))
    sink(ProblemKind::kValidation, 0, "cpu speed must be positive");
  if (t.samples.empty()) {
    sink(ProblemKind::kValidation, 0, "trace has no samples");
    return;
  }
  const double tol = kPeriodTolerance * t.sampling_period_s;
  for (std::size_t k = 0; k < t.samples.size(); ++k) {
    const auto& s = t.samples[k];
    if (k > 0 && s.window_index <= t.samples[k - 1].window_index) {
      sink(ProblemKind::kValidation, line_of(k),
           "window indices must be strictly increasing");
    }
    const bool last = k + 1 == t.samples.size();
    if (!last && std::fabs(s.window_seconds - t.sampling_period_s) > tol) {
      sink(ProblemKind::kValidation, line_of(k),
           "window " + std::to_string(s.window_index) +
               " duration differs from the sampling period");
    }
    if (last && s.window_seconds > t.sampling_period_s + tol) {
      sink(ProblemKind::kValidation, line_of(k),
           "final window is longer than the sampling period");
    }
  }
  const double min_total = static_cast<double>(t.samples.size() - 1) * t.sampling_period_s;
  if (t.total_time_s + tol < min_total) {
    sink(ProblemKind::kValidation, 0, "total_time is shorter than the sampled windows");
  }
}

struct Header {
  std::optional<std::string> app;
  std::optional<double> sa;
  std::optional<std::uint64_t> cores;
  std::optional<double> mhz;
  std::optional<double> total;
  std::string label;
};

// Shared by the strict parser and the lenient scanner. Every problem goes to
// the sink; the strict sink throws, so parsing stops at the first one there.
RawTrace read_trace(std::string_view text, const ProblemSink& sink,
                    std::vector<std::size_t>* sample_lines) {
  RawTrace trace;
  Header header;
  bool have_meta = false;
  bool have_columns = false;
  const auto lines = split(text, '\n');
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const std::size_t lineno = idx + 1;
    const auto line = trim(lines[idx]);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (have_meta) continue;
      have_meta = true;
      for (const auto tok : split_ws(line.substr(1))) {
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos) {
          sink(ProblemKind::kParse, lineno, "malformed metadata token '" + std::string(tok) + "'");
          continue;
        }
        const auto key = tok.substr(0, eq);
        const auto val = tok.substr(eq + 1);
        if (key == "app") {
          header.app = std::string(val);
        } else if (key == "label") {
          header.label = std::string(val);
        } else if (key == "cores") {
          std::uint64_t c = 0;
          if (to_count(val, c) != CountStatus::kOk) {
            sink(ProblemKind::kParse, lineno, "cores is not a non-negative integer");
          } else {
            header.cores = c;
          }
        } else {
          const auto v = to_double(val);
          if (!v) {
            sink(ProblemKind::kParse, lineno, std::string(key) + " is not numeric");
            continue;
          }
          if (key == "sA") header.sa = *v;
          else if (key == "mhz") header.mhz = *v;
          else if (key == "total_time") header.total = *v;
          else sink(ProblemKind::kParse, lineno, "unknown metadata key '" + std::string(key) + "'");
        }
      }
      continue;
    }
    if (!have_columns) {
      if (line != kTraceCsvHeader) {
        sink(ProblemKind::kParse, lineno, "expected column header row");
      }
      have_columns = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != kColumns) {
      sink(ProblemKind::kParse, lineno,
           "expected " + std::to_string(kColumns) + " columns, got " +
               std::to_string(fields.size()));
      continue;
    }
    RawSample s;
    std::array<std::uint64_t*, kColumns> slots = {
        &s.window_index,    nullptr,           &s.cycles,          &s.instructions,
        &s.cache_refs,      &s.cache_misses,   &s.llc_loads,       &s.llc_load_misses,
        &s.llc_stores,      &s.llc_store_misses, &s.branches,      &s.branch_misses,
        &s.page_faults};
    bool row_ok = true;
    for (std::size_t c = 0; c < kColumns; ++c) {
      if (c == 1) {
        const auto v = to_double(fields[c]);
        if (!v) {
          sink(ProblemKind::kParse, lineno, "seconds is not numeric");
          row_ok = false;
        } else {
          s.window_seconds = *v;
        }
        continue;
      }
      const auto status = to_count(fields[c], *slots[c]);
      const std::string name(kColumnNames[c]);
      switch (status) {
        case CountStatus::kOk:
          break;
        case CountStatus::kNegative:
          sink(ProblemKind::kValidation, lineno, "negative count in column " + name);
          row_ok = false;
          break;
        case CountStatus::kOverflow:
          sink(ProblemKind::kParse, lineno, "count overflows 64 bits in column " + name);
          row_ok = false;
          break;
        case CountStatus::kInvalid:
          sink(ProblemKind::kParse, lineno, "non-numeric value in column " + name);
          row_ok = false;
          break;
      }
    }
    if (!row_ok) continue;
    check_sample(s, lineno, sink);
    trace.samples.push_back(s);
    if (sample_lines) sample_lines->push_back(lineno);
  }
  if (!have_meta) sink(ProblemKind::kParse, 1, "missing '# app=...' metadata line");
  if (!have_columns) sink(ProblemKind::kParse, lines.size(), "missing column header row");
  const auto require = [&](bool present, const char* key) {
    if (!present) sink(ProblemKind::kParse, 1, std::string("metadata key '") + key + "' missing");
  };
  require(header.app.has_value(), "app");
  require(header.sa.has_value(), "sA");
  require(header.cores.has_value(), "cores");
  require(header.mhz.has_value(), "mhz");
  require(header.total.has_value(), "total_time");
  trace.app_name = header.app.value_or("");
  trace.sampling_period_s = header.sa.value_or(0.0);
  if (header.cores && *header.cores > UINT32_MAX) {
    sink(ProblemKind::kParse, 1, "cores out of range");
  }
  trace.machine.cores = static_cast<std::uint32_t>(header.cores.value_or(0));
  trace.machine.cpu_speed_mhz = header.mhz.value_or(0.0);
  trace.machine.label = header.label;
  trace.total_time_s = header.total.value_or(0.0);
  return trace;
}

}  // namespace

RawTrace parse_trace_csv(std::string_view text) {
  const ProblemSink strict = [](ProblemKind kind, std::size_t line, const std::string& msg) {
    switch (kind) {
      case ProblemKind::kParse:
        throw ParseError(line, msg);
      case ProblemKind::kValidation:
        throw ValidationError(line ? "line " + std::to_string(line) + ": " + msg : msg);
      case ProblemKind::kWarning:
        break;
    }
  };
  std::vector<std::size_t> lines;
  auto trace = read_trace(text, strict, &lines);
  check_layout(trace, lines, strict);
  return trace;
}

std::string render_trace_csv(const RawTrace& trace) {
  for (const char c : trace.app_name + trace.machine.label) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      throw ValidationError("app name and machine label must not contain whitespace");
    }
  }
  std::ostringstream os;
  os << "# app=" << trace.app_name << " sA=" << format_double(trace.sampling_period_s)
     << " cores=" << trace.machine.cores << " mhz=" << format_double(trace.machine.cpu_speed_mhz)
     << " total_time=" << format_double(trace.total_time_s);
  if (!trace.machine.label.empty()) os << " label=" << trace.machine.label;
  os << '\n' << kTraceCsvHeader << '\n';
  for (const auto& s : trace.samples) {
    os << s.window_index << ',' << format_double(s.window_seconds) << ',' << s.cycles << ','
       << s.instructions << ',' << s.cache_refs << ',' << s.cache_misses << ',' << s.llc_loads
       << ',' << s.llc_load_misses << ',' << s.llc_stores << ',' << s.llc_store_misses << ','
       << s.branches << ',' << s.branch_misses << ',' << s.page_faults << '\n';
  }
  return os.str();
}

ValidationReport validate_trace(const RawTrace& trace) {
  ValidationReport report;
  const ProblemSink collect = [&](ProblemKind kind, std::size_t, const std::string& msg) {
    report.push_back({kind == ProblemKind::kWarning ? Severity::kWarning : Severity::kError, msg});
  };
  for (const auto& s : trace.samples) check_sample(s, 0, collect);
  check_layout(trace, {}, collect);
  return report;
}

ValidationReport validate_trace_csv(std::string_view text) {
  ValidationReport report;
  const ProblemSink collect = [&](ProblemKind kind, std::size_t line, const std::string& msg) {
    const std::string where = line ? "line " + std::to_string(line) + ": " : "";
    report.push_back(
        {kind == ProblemKind::kWarning ? Severity::kWarning : Severity::kError, where + msg});
  };
  std::vector<std::size_t> lines;
  const auto trace = read_trace(text, collect, &lines);
  check_layout(trace, lines, collect);
  return report;
}

bool has_errors(const ValidationReport& report) {
  for (const auto& d : report) {
    if (d.severity == Severity::kError) return true;
  }
  return false;
}

std::vector<double> window_end_times(const RawTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.samples.size());
  double t = 0.0;
  for (const auto& s : trace.samples) {
    t += s.window_seconds;
    out.push_back(t);
  }
  return out;
}

std::vector<std::uint64_t> cumulative_instructions(const RawTrace& trace) {
  std::vector<std::uint64_t> out;
  out.reserve(trace.samples.size());
  std::uint64_t total = 0;
  for (const auto& s : trace.samples) {
    if (total > UINT64_MAX - s.instructions) {
      throw ValidationError("cumulative instruction count overflows 64 bits");
    }
    total += s.instructions;
    out.push_back(total);
  }
  return out;
}

}  // namespace ifx
