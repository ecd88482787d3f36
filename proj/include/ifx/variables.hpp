#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "ifx/trace.hpp"

namespace ifx {

/// Page-fault statistics over a whole reference dataset; used to
/// standardize the fault variable.
struct DatasetStats {
  double faults_mean = 0.0;
  double faults_std = 0.0;
  std::size_t sample_count = 0;
};

/// The ten relative variables of one window. `v[0]` is v1, ..., `v[9]` is v10.
struct VariableVector {
  std::array<double, 10> v{};
  bool zero_instructions = false;

  double operator()(int one_based) const { return v[static_cast<std::size_t>(one_based - 1)]; }
};

/// Sample mean and standard deviation (n-1 denominator) of page_faults over
/// every window of every trace. Throws DataError with fewer than 2 windows.
DatasetStats compute_dataset_stats(std::span<const RawTrace> traces);

/// Ratios per window:
///   v1..v4  events per instruction (cache refs, branches, LLC loads, LLC stores)
///   v5..v8  miss rates (cache, branch, LLC load, LLC store)
///   v9      standardized page faults
///   v10     cycles / (seconds * MHz * 1e6 * cores), clamped to [0, 1]
/// Zero denominators yield 0 for the affected ratio; never throws.
VariableVector derive_variables(const RawSample& sample, const MachineSpec& machine,
                                const DatasetStats& stats);

}  // namespace ifx
