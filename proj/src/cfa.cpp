#include "ifx/cfa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ifx/errors.hpp"

namespace ifx {
namespace {

std::vector<Eigen::Index> canonical_row_order(const Eigen::MatrixXd& x) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (x(a, c) != x(b, c)) return x(a, c) < x(b, c);
    }
    return a < b;
  });
  return order;
}

Eigen::VectorXd ordered_means(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& order) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.cols());
  for (const auto r : order) sum += x.row(r).transpose();
  return sum / static_cast<double>(x.rows());
}

// Log-determinant via Cholesky; nullopt-like NaN if not positive definite.
double log_det_pd(const Eigen::MatrixXd& a, Eigen::LLT<Eigen::MatrixXd>& llt) {
  llt.compute(a);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  const auto& l = llt.matrixL();
  double ld = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double d = l(i, i);
    if (!(d > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    ld += 2.0 * std::log(d);
  }
  return ld;
}

void require_nonsingular(const Eigen::MatrixXd& s, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double hi = ev.cwiseAbs().maxCoeff();
  if (!(ev.minCoeff() > 1e-12 * std::max(hi, 1e-300))) {
    throw NumericalError(std::string(what) + " is singular");
  }
}

// Free parameters: one loading per observed variable (on its assigned
// factor) followed by log unique variances.
class MlObjective {
 public:
  MlObjective(const Eigen::MatrixXd& s, const std::vector<int>& structure, int m)
      : s_(s), structure_(structure), p_(static_cast<int>(s.rows())), m_(m) {
    Eigen::LLT<Eigen::MatrixXd> llt;
    log_det_s_ = log_det_pd(s_, llt);
  }

  Eigen::MatrixXd loadings(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(p_, m_);
    for (int i = 0; i < p_; ++i) l(i, structure_[static_cast<std::size_t>(i)]) = theta(i);
    return l;
  }

  Eigen::VectorXd psi(const Eigen::VectorXd& theta) const {
    return theta.tail(p_).array().exp().matrix();
  }

  Eigen::MatrixXd sigma(const Eigen::VectorXd& theta) const {
    const auto l = loadings(theta);
    Eigen::MatrixXd sig = l * l.transpose();
    sig.diagonal() += psi(theta);
    return sig;
  }

  /// Returns +inf where sigma(theta) is not positive definite.
  double value(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const {
    const auto sig = sigma(theta);
    Eigen::LLT<Eigen::MatrixXd> llt;
    const double ld = log_det_pd(sig, llt);
    if (std::isnan(ld)) return std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(p_, p_));
    const double f = ld + (s_ * inv).trace() - log_det_s_ - p_;
    if (grad) {
      const Eigen::MatrixXd g = inv - inv * s_ * inv;
      const Eigen::MatrixXd gl = 2.0 * g * loadings(theta);
      const auto ps = psi(theta);
      grad->resize(2 * p_);
      for (int i = 0; i < p_; ++i) {
        (*grad)(i) = gl(i, structure_[static_cast<std::size_t>(i)]);
        (*grad)(p_ + i) = g(i, i) * ps(i);
      }
    }
    return f;
  }

 private:
  const Eigen::MatrixXd& s_;
  const std::vector<int>& structure_;
  int p_;
  int m_;
  double log_det_s_ = 0.0;
};

Eigen::VectorXd initial_theta(const Eigen::MatrixXd& s, const std::vector<int>& structure, int m) {
  const int p = static_cast<int>(s.rows());
  Eigen::VectorXd theta(2 * p);
  for (int f = 0; f < m; ++f) {
    std::vector<int> vars;
    for (int i = 0; i < p; ++i) {
      if (structure[static_cast<std::size_t>(i)] == f) vars.push_back(i);
    }
    const int k = static_cast<int>(vars.size());
    Eigen::MatrixXd block(k, k);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) block(a, b) = s(vars[a], vars[b]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
    const double top = es.eigenvalues()(k - 1);
    Eigen::VectorXd dir = es.eigenvectors().col(k - 1);
    Eigen::Index big = 0;
    dir.cwiseAbs().maxCoeff(&big);
    if (dir(big) < 0.0) dir = -dir;
    // Half of each variance is attributed to the factor, half to the error.
    const double scale = std::sqrt(std::max(top, 0.0) / 2.0);
    for (int a = 0; a < k; ++a) theta(vars[a]) = dir(a) * scale;
  }
  for (int i = 0; i < p; ++i) theta(p + i) = std::log(s(i, i) / 2.0);
  return theta;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw DataError("covariance matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > kTolerance * scale) {
    throw DataError("covariance matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kTolerance * scale) {
    throw DataError("covariance matrix is not positive semidefinite");
  }
}

CovarianceMatrix CovarianceMatrix::sample(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw DataError("sample covariance needs at least 2 observations");
  const auto order = canonical_row_order(x);
  const Eigen::VectorXd mu = ordered_means(x, order);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  for (const auto r : order) {
    const Eigen::VectorXd d = x.row(r).transpose() - mu;
    acc.noalias() += d * d.transpose();
  }
  acc /= static_cast<double>(x.rows() - 1);
  acc = 0.5 * (acc + acc.transpose());
  return CovarianceMatrix(std::move(acc));
}

Eigen::VectorXd sample_means(const Eigen::MatrixXd& observations) {
  if (observations.rows() == 0) throw DataError("no observations");
  return ordered_means(observations, canonical_row_order(observations));
}

Eigen::MatrixXd implied_covariance(const MeasurementModel& model) {
  Eigen::MatrixXd sig = model.loadings * model.factor_cov * model.loadings.transpose();
  sig.diagonal() += model.unique_var;
  return sig;
}

double ml_discrepancy(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& s) {
  if (sigma.rows() != s.rows() || sigma.cols() != s.cols() || sigma.rows() != sigma.cols()) {
    throw DataError("ml_discrepancy: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt_sigma;
  Eigen::LLT<Eigen::MatrixXd> llt_s;
  const double ld_sigma = log_det_pd(sigma, llt_sigma);
  const double ld_s = log_det_pd(s, llt_s);
  if (std::isnan(ld_sigma) || std::isnan(ld_s)) {
    throw NumericalError("ml_discrepancy: matrix is not positive definite");
  }
  const Eigen::MatrixXd inv = llt_sigma.solve(Eigen::MatrixXd::Identity(s.rows(), s.rows()));
  return std::max(0.0, ld_sigma + (s * inv).trace() - ld_s - static_cast<double>(s.rows()));
}

FitResult fit_measurement_model(const Eigen::MatrixXd& observations,
                                const std::vector<int>& structure, const FitOptions& options) {
  const auto n = observations.rows();
  const int p = static_cast<int>(observations.cols());
  if (static_cast<int>(structure.size()) != p) {
    throw DataError("structure must assign a factor to every observed variable");
  }
  if (p < 1) throw DataError("no observed variables");
  const int m = *std::max_element(structure.begin(), structure.end()) + 1;
  if (*std::min_element(structure.begin(), structure.end()) < 0) {
    throw DataError("factor indices must be non-negative");
  }
  for (int f = 0; f < m; ++f) {
    if (std::find(structure.begin(), structure.end(), f) == structure.end()) {
      throw DataError("factor " + std::to_string(f) + " has no assigned variable");
    }
  }
  if (n <= p) throw DataError("need more observations than variables");

  const auto s_cov = CovarianceMatrix::sample(observations);
  const Eigen::MatrixXd& s = s_cov.matrix();
  require_nonsingular(s, "sample covariance");

  MlObjective objective(s, structure, m);
  Eigen::VectorXd theta = initial_theta(s, structure, m);
  Eigen::VectorXd grad;
  double f = objective.value(theta, &grad);
  const int dim = static_cast<int>(theta.size());
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(dim, dim);

  // BFGS with Armijo backtracking.
  int iter = 0;
  bool converged = false;
  bool just_reset = false;
  for (; iter < options.max_iterations; ++iter) {
    const double gnorm = grad.cwiseAbs().maxCoeff();
    if (gnorm < options.gradient_tolerance) {
      converged = true;
      break;
    }
    Eigen::VectorXd dir = -h_inv * grad;
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      h_inv.setIdentity();
      dir = -grad;
      slope = grad.dot(dir);
    }
    double step = 1.0;
    Eigen::VectorXd next;
    Eigen::VectorXd next_grad;
    double next_f = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      next = theta + step * dir;
      next_f = objective.value(next, &next_grad);
      if (std::isfinite(next_f) && next_f <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (just_reset) {
        if (gnorm < 1e-6) converged = true;
        break;
      }
      h_inv.setIdentity();
      just_reset = true;
      continue;
    }
    just_reset = false;
    const Eigen::VectorXd sdelta = next - theta;
    const Eigen::VectorXd ydelta = next_grad - grad;
    const double change = f - next_f;
    theta = next;
    grad = next_grad;
    f = next_f;
    const double sy = sdelta.dot(ydelta);
    if (sy > 1e-12 * sdelta.norm() * ydelta.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
      h_inv = (eye - rho * sdelta * ydelta.transpose()) * h_inv *
                  (eye - rho * ydelta * sdelta.transpose()) +
              rho * sdelta * sdelta.transpose();
    }
    if (std::fabs(change) < options.discrepancy_tolerance &&
        grad.cwiseAbs().maxCoeff() < 1e-5) {
      converged = true;
      ++iter;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os.precision(17);
    os << "measurement model fit did not converge after " << iter
       << " iterations; last discrepancy " << f;
    throw NumericalError(os.str());
  }

  MeasurementModel model;
  model.p = p;
  model.m = m;
  model.structure = structure;
  model.loadings = objective.loadings(theta);
  for (int c = 0; c < m; ++c) {
    Eigen::Index big = 0;
    model.loadings.col(c).cwiseAbs().maxCoeff(&big);
    if (model.loadings(big, c) < 0.0) model.loadings.col(c) *= -1.0;
  }
  model.factor_cov = Eigen::MatrixXd::Identity(m, m);
  model.unique_var = objective.psi(theta);
  model.means = sample_means(observations);
  return {std::move(model), std::max(0.0, f), iter};
}

ScoreMatrix score_matrix(const MeasurementModel& model, const CovarianceMatrix& sigma) {
  if (sigma.dim() != model.p || model.loadings.rows() != model.p ||
      model.loadings.cols() != model.m || model.factor_cov.rows() != model.m) {
    throw DataError("score_matrix: dimension mismatch");
  }
  require_nonsingular(sigma.matrix(), "covariance matrix");
  const Eigen::MatrixXd inv = sigma.matrix().ldlt().solve(Eigen::MatrixXd::Identity(model.p, model.p));
  return {model.factor_cov * model.loadings.transpose() * inv};
}

Eigen::VectorXd score(const ScoreMatrix& scores, const Eigen::VectorXd& centered_obs) {
  if (scores.b.cols() != centered_obs.size()) {
    throw DataError("score: observation has " + std::to_string(centered_obs.size()) +
                    " entries, score matrix expects " + std::to_string(scores.b.cols()));
  }
  return scores.b * centered_obs;
}

std::pair<MeasurementModel, ScoreMatrix> preset_index_model() {
  MeasurementModel model;
  model.p = 8;
  model.m = 2;
  model.loadings = Eigen::MatrixXd::Zero(8, 2);
  model.loadings.col(0).head(4) << 2.202, 0.179, 2.342, 2.011;
  model.loadings.col(1).tail(4) << 1.315, -0.259, 1.241, 1.483;
  model.factor_cov = Eigen::MatrixXd::Identity(2, 2);
  model.unique_var = Eigen::VectorXd::Zero(8);
  model.means.resize(8);
  model.means << -6.079, -2.049, -6.448, -8.734, -2.051, -3.796, -2.083, -1.857;
  model.structure = {0, 0, 0, 0, 1, 1, 1, 1};
  ScoreMatrix b;
  b.b.resize(2, 8);
  b.b << 1.0, -0.06, -0.48, -0.04, 0.0, 0.0, 0.0, 0.0,
         0.0, 0.0, 0.0, 0.0, 1.40, 0.05, -0.46, -0.14;
  return {std::move(model), std::move(b)};
}

std::vector<int> structure_from_loadings(const Eigen::MatrixXd& loadings) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(loadings.rows()));
  for (Eigen::Index i = 0; i < loadings.rows(); ++i) {
    int found = -1;
    for (Eigen::Index c = 0; c < loadings.cols(); ++c) {
      if (loadings(i, c) != 0.0) {
        if (found >= 0) throw DataError("variable " + std::to_string(i) + " loads on two factors");
        found = static_cast<int>(c);
      }
    }
    if (found < 0) throw DataError("variable " + std::to_string(i) + " has no loading");
    out.push_back(found);
  }
  return out;
}

}  // namespace ifx
