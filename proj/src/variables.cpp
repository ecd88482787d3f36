#include "ifx/variables.hpp"

#include <algorithm>
#include <cmath>

#include "ifx/errors.hpp"

namespace ifx {
namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

DatasetStats compute_dataset_stats(std::span<const RawTrace> traces) {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  // Welford accumulation; page-fault counts can be large.
  for (const auto& t : traces) {
    for (const auto& s : t.samples) {
      ++n;
      const double x = static_cast<double>(s.page_faults);
      const double d = x - mean;
      mean += d / static_cast<double>(n);
      m2 += d * (x - mean);
    }
  }
  if (n < 2) throw DataError("dataset statistics need at least 2 windows");
  return {mean, std::sqrt(std::max(0.0, m2 / static_cast<double>(n - 1))), n};
}

VariableVector derive_variables(const RawSample& s, const MachineSpec& machine,
                                const DatasetStats& stats) {
  VariableVector out;
  auto& v = out.v;
  out.zero_instructions = s.instructions == 0;
  v[0] = ratio(s.cache_refs, s.instructions);
  v[1] = ratio(s.branches, s.instructions);
  v[2] = ratio(s.llc_loads, s.instructions);
  v[3] = ratio(s.llc_stores, s.instructions);
  v[4] = ratio(s.cache_misses, s.cache_refs);
  v[5] = ratio(s.branch_misses, s.branches);
  v[6] = ratio(s.llc_load_misses, s.llc_loads);
  v[7] = ratio(s.llc_store_misses, s.llc_stores);
  v[8] = stats.faults_std > 0.0
             ? (static_cast<double>(s.page_faults) - stats.faults_mean) / stats.faults_std
             : 0.0;
  const double capacity = s.window_seconds * machine.cpu_speed_mhz * 1e6 *
                          static_cast<double>(machine.cores);
  v[9] = capacity > 0.0 ? std::clamp(static_cast<double>(s.cycles) / capacity, 0.0, 1.0) : 0.0;
  return out;
}

}  // namespace ifx
