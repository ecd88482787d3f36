#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace ifx {

/**
 * Confirmatory factor analysis measurement model
 *
 *   x = loadings * f + means + e,   Cov(f) = factor_cov,   Cov(e) = diag(unique_var)
 *
 * with each observed variable loading on exactly one factor
 * (`structure[i]` is the factor of variable i).
 */
struct MeasurementModel {
  int p = 0;
  int m = 0;
  Eigen::MatrixXd loadings;    // p x m
  Eigen::MatrixXd factor_cov;  // m x m
  Eigen::VectorXd unique_var;  // diagonal of the p x p error covariance
  Eigen::VectorXd means;       // length p
  std::vector<int> structure;  // length p, values in [0, m)
};

/// Regression factor-score coefficients (m x p).
struct ScoreMatrix {
  Eigen::MatrixXd b;
};

/// Symmetric positive semidefinite p x p matrix. Construction validates.
class CovarianceMatrix {
 public:
  static constexpr double kTolerance = 1e-8;

  explicit CovarianceMatrix(Eigen::MatrixXd m);

  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }

  /// Unbiased sample covariance of the rows of `observations` (n x p).
  /// Rows are accumulated in lexicographic order so the result does not
  /// depend on row order.
  static CovarianceMatrix sample(const Eigen::MatrixXd& observations);

 private:
  Eigen::MatrixXd m_;
};

/// Column means of `observations`, accumulated in the same canonical row
/// order as CovarianceMatrix::sample.
Eigen::VectorXd sample_means(const Eigen::MatrixXd& observations);

/// Sigma = loadings * factor_cov * loadings^T + diag(unique_var).
Eigen::MatrixXd implied_covariance(const MeasurementModel& model);

/// Maximum-likelihood discrepancy
///   ln|sigma| + tr(s * sigma^-1) - ln|s| - p.
/// Zero iff sigma == s. Throws NumericalError if either matrix is not
/// positive definite.
double ml_discrepancy(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& s);

struct FitOptions {
  int max_iterations = 10000;
  double discrepancy_tolerance = 1e-10;
  double gradient_tolerance = 1e-9;
};

struct FitResult {
  MeasurementModel model;
  double discrepancy = 0.0;
  int iterations = 0;
};

/// Maximum-likelihood fit with factor variances fixed to 1 and factor
/// covariances fixed to 0. Each column of the returned loadings is
/// sign-normalized so its largest-magnitude entry is positive.
///
/// Throws NumericalError if the sample covariance is singular or the
/// optimizer does not converge within `max_iterations` (the message carries
/// the last discrepancy value).
FitResult fit_measurement_model(const Eigen::MatrixXd& observations,
                                const std::vector<int>& structure,
                                const FitOptions& options = {});

/// B = factor_cov * loadings^T * sigma^-1. Throws NumericalError if sigma is
/// singular, DataError on dimension mismatch.
ScoreMatrix score_matrix(const MeasurementModel& model, const CovarianceMatrix& sigma);

/// Factor scores B * x for an already-centered observation.
Eigen::VectorXd score(const ScoreMatrix& scores, const Eigen::VectorXd& centered_obs);

/// The reference 8-variable, 2-factor index model: v1..v4 load on the
/// memory-hierarchy factor, v5..v8 on the cache-miss factor. Loadings,
/// means and score coefficients are the reference values; error variances
/// were never given for it and are stored as zero.
std::pair<MeasurementModel, ScoreMatrix> preset_index_model();

/// Factor index of each observed variable, taken from the nonzero loading
/// of each row. Throws DataError if a row does not have exactly one.
std::vector<int> structure_from_loadings(const Eigen::MatrixXd& loadings);

}  // namespace ifx
