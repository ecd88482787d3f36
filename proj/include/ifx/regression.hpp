#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "ifx/bench.hpp"
#include "ifx/profile.hpp"

namespace ifx {

inline constexpr int kModelTerms = 9;

/// Non-negative coefficients of
///   delta = beta0 + sum_j beta_j f_Aj + sum_j beta_{j+4} f_Bj.
struct InterferenceModel {
  std::array<double, kModelTerms> beta{};
  std::string scope;  // application name, or "single" for a pooled model
  double rss = 0.0;
  std::size_t n_obs = 0;
};

/// Regressor rows (1, f_A1..f_A4, f_B1..f_B4) with one target per row.
struct DesignMatrix {
  Eigen::MatrixXd x;  // rows x 9
  Eigen::VectorXd y;
};

/// Regressor row at time t for application profile `a` against `b`.
Eigen::Matrix<double, 1, kModelTerms> regressor_row(const InterferenceProfile& a,
                                                    const InterferenceProfile& b, double t);

/// One row per (interval i, co-runner j), interval-major; regressors are
/// evaluated at the upper bound (i + 1) * s_A and the target is delta_ij.
/// `co_runner_profiles[j]` pairs with `obs.columns[j]`. Throws DataError if
/// any sampling period differs from the observations'.
DesignMatrix assemble_design(const InterferenceProfile& app,
                             std::span<const InterferenceProfile> co_runner_profiles,
                             const BenchmarkObservations& obs);

struct NnlsResult {
  Eigen::VectorXd beta;
  double rss = 0.0;
  int iterations = 0;
};

/// Lawson-Hanson active-set solution of min ||x b - y|| subject to b >= 0.
/// Variables enter in order of largest positive gradient component
/// x^T (y - x b); ties go to the lowest index.
NnlsResult nnls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Per-application model from its co-runs against the benchmark profiles.
InterferenceModel fit_model(const InterferenceProfile& app,
                            std::span<const InterferenceProfile> co_runner_profiles,
                            const BenchmarkObservations& obs);

/// One application's training data for a pooled fit.
struct TrainingSet {
  InterferenceProfile app;
  std::vector<InterferenceProfile> co_runners;
  BenchmarkObservations observations;
};

/// Pooled model: designs of every set stacked row-wise. Throws DataError
/// on empty input.
InterferenceModel fit_single_model(std::span<const TrainingSet> sets);

/// Numerical rank of a design (used to warn about unidentifiable fits).
int design_rank(const DesignMatrix& d);

}  // namespace ifx
