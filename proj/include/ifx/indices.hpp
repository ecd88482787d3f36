#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ifx/cfa.hpp"
#include "ifx/trace.hpp"
#include "ifx/variables.hpp"

namespace ifx {

/// Floor applied to every logarithm argument.
inline constexpr double kLogFloor = 1e-12;

/// Untransformed index values of one window.
struct RawIndexVector {
  double i1 = 0.0;      // CPU usage, already in [0, 1]
  double i2_hat = 0.0;  // ln(v9 + 1)
  double i3_hat = 0.0;  // memory-hierarchy factor score
  double i4_hat = 0.0;  // cache-miss factor score
  bool floored = false; // some log argument hit kLogFloor
};

/// Empirical CDF with plotting positions (k - 0.5) / n, linear
/// interpolation between positions and clamping outside the support.
class EmpiricalCdf {
 public:
  EmpiricalCdf() = default;
  /// Wraps precomputed support/positions (e.g. loaded from JSON). Throws
  /// DataError unless both are strictly ascending, equally sized, with
  /// positions in (0, 1).
  EmpiricalCdf(std::vector<double> support, std::vector<double> positions);

  const std::vector<double>& support() const noexcept { return support_; }
  const std::vector<double>& positions() const noexcept { return positions_; }

  /// Probability in [0, 1]; monotone non-decreasing in x.
  double operator()(double x) const;

 private:
  std::vector<double> support_;
  std::vector<double> positions_;
};

/// Ties collapse to the mean of their plotting positions. Throws DataError
/// when fewer than two distinct finite values are given.
EmpiricalCdf build_cdf(std::span<const double> samples);

double cdf_transform(const EmpiricalCdf& cdf, double x);

/// Transformed indices of one window, each in [0, 1].
struct IndexVector {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  double i4 = 0.0;

  std::array<double, 4> as_array() const { return {i1, i2, i3, i4}; }
};

struct IndexTrace {
  std::string app_name;
  double sampling_period_s = 0.0;
  std::vector<IndexVector> rows;
  std::vector<std::size_t> flagged_windows;  // zero-instruction or log-floored windows
};

/// Reference CDFs for the page-fault, memory-hierarchy and cache-miss indices.
struct IndexCdfs {
  EmpiricalCdf i2;
  EmpiricalCdf i3;
  EmpiricalCdf i4;
};

/// Everything needed to turn a new trace into indices consistently with a
/// reference dataset.
struct IndexCalibration {
  MeasurementModel model;
  ScoreMatrix scores;
  DatasetStats stats;
  IndexCdfs cdfs;
};

/// Calibrates fault statistics and CDFs on `reference` for a given model.
IndexCalibration calibrate(std::span<const RawTrace> reference, MeasurementModel model,
                           ScoreMatrix scores);

/// Fits the index measurement model on the log variables of `reference`
/// (v1..v4 on one factor, v5..v8 on the other), derives score coefficients
/// from the sample covariance, then calibrates.
IndexCalibration fit_calibration(std::span<const RawTrace> reference);

/// Requires the 8-variable, 2-factor layout: row 0 of `scores` weights
/// v1..v4, row 1 weights v5..v8, each centered on the model means in the
/// log domain.
RawIndexVector raw_indices(const VariableVector& v, const MeasurementModel& model,
                           const ScoreMatrix& scores);

/// Raw indices of every window of every trace, in order.
std::vector<RawIndexVector> raw_index_population(std::span<const RawTrace> traces,
                                                 const DatasetStats& stats,
                                                 const MeasurementModel& model,
                                                 const ScoreMatrix& scores);

/// Builds the three reference CDFs from a raw-index population.
IndexCdfs build_index_cdfs(std::span<const RawIndexVector> population);

/// Log variables ln(max(v_i, floor)) for i = 1..8 of every window (n x 8);
/// the observation matrix for fitting the index measurement model.
Eigen::MatrixXd log_variable_matrix(std::span<const RawTrace> traces, const DatasetStats& stats);

/// Full per-window pipeline: variables, raw indices, then CDF transform of
/// indices 2..4. Index 1 passes through untransformed.
IndexTrace index_trace(const RawTrace& trace, const MachineSpec& machine,
                       const DatasetStats& stats, const MeasurementModel& model,
                       const ScoreMatrix& scores, const IndexCdfs& cdfs);

IndexTrace index_trace(const RawTrace& trace, const IndexCalibration& calibration);

}  // namespace ifx
