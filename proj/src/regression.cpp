#include "ifx/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ifx/errors.hpp"

namespace ifx {
namespace {

constexpr double kPeriodTolerance = 1e-12;

bool same_period(double a, double b) {
  return std::fabs(a - b) <= kPeriodTolerance * std::max(std::fabs(a), std::fabs(b));
}

// Least squares restricted to the columns flagged in `passive`; other
// entries of the result are zero.
Eigen::VectorXd passive_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (std::size_t j = 0; j < passive.size(); ++j) {
    if (passive[j]) cols.push_back(static_cast<Eigen::Index>(j));
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.cols());
  if (cols.empty()) return out;
  Eigen::MatrixXd sub(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = x.col(cols[c]);
  const Eigen::VectorXd z = sub.colPivHouseholderQr().solve(y);
  for (std::size_t c = 0; c < cols.size(); ++c) out(cols[c]) = z(static_cast<Eigen::Index>(c));
  return out;
}

}  // namespace

Eigen::Matrix<double, 1, kModelTerms> regressor_row(const InterferenceProfile& a,
                                                    const InterferenceProfile& b, double t) {
  Eigen::Matrix<double, 1, kModelTerms> row;
  const auto fa = eval_profile_all(a, t);
  const auto fb = eval_profile_all(b, t);
  row(0) = 1.0;
  for (int j = 0; j < 4; ++j) {
    row(1 + j) = fa[static_cast<std::size_t>(j)];
    row(5 + j) = fb[static_cast<std::size_t>(j)];
  }
  return row;
}

DesignMatrix assemble_design(const InterferenceProfile& app,
                             std::span<const InterferenceProfile> co_runner_profiles,
                             const BenchmarkObservations& obs) {
  validate_observations(obs);
  if (co_runner_profiles.size() != obs.columns.size()) {
    throw DataError("need one co-runner profile per observation column");
  }
  const double s = obs.sampling_period_s;
  if (!same_period(app.sampling_period_s, s)) {
    throw DataError("profile '" + app.app_name +
                    "' sampling period differs from the observations; resample first");
  }
  for (const auto& b : co_runner_profiles) {
    if (!same_period(b.sampling_period_s, s)) {
      throw DataError("profile '" + b.app_name +
                      "' sampling period differs from the observations; resample first");
    }
  }
  const auto n = obs.intervals();
  const auto m = obs.columns.size();
  DesignMatrix d;
  d.x.resize(static_cast<Eigen::Index>(n * m), kModelTerms);
  d.y.resize(static_cast<Eigen::Index>(n * m));
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1) * s;
    for (std::size_t j = 0; j < m; ++j) {
      d.x.row(r) = regressor_row(app, co_runner_profiles[j], t);
      d.y(r) = obs.columns[j].delta[i];
      ++r;
    }
  }
  return d;
}

NnlsResult nnls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw DataError("nnls: design and target sizes differ");
  if (x.rows() < 1 || x.cols() < 1) throw DataError("nnls: empty problem");
  const auto n = static_cast<std::size_t>(x.cols());
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     std::max<double>(1.0, x.cwiseAbs().colwise().sum().maxCoeff()) *
                     static_cast<double>(std::max(x.rows(), x.cols()));

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  std::vector<bool> passive(n, false);
  std::vector<bool> blocked(n, false);
  Eigen::VectorXd w = x.transpose() * (y - x * beta);
  int iterations = 0;
  const int max_iterations = 30 * static_cast<int>(n) + 30;

  while (iterations < max_iterations) {
    // Entering variable: largest positive w among the active (zero) set.
    Eigen::Index enter = -1;
    double best = tol;
    for (std::size_t j = 0; j < n; ++j) {
      if (!passive[j] && !blocked[j] && w(static_cast<Eigen::Index>(j)) > best) {
        best = w(static_cast<Eigen::Index>(j));
        enter = static_cast<Eigen::Index>(j);
      }
    }
    if (enter < 0) break;
    passive[static_cast<std::size_t>(enter)] = true;

    bool entered_ok = true;
    bool first_solve = true;
    for (;;) {
      ++iterations;
      const Eigen::VectorXd z = passive_solve(x, y, passive);
      if (first_solve && z(enter) <= 0.0) {
        // The entering column cannot improve the fit numerically.
        passive[static_cast<std::size_t>(enter)] = false;
        blocked[static_cast<std::size_t>(enter)] = true;
        entered_ok = false;
        break;
      }
      first_solve = false;
      bool feasible = true;
      for (std::size_t j = 0; j < n; ++j) {
        if (passive[j] && z(static_cast<Eigen::Index>(j)) <= 0.0) feasible = false;
      }
      if (feasible) {
        beta = z;
        break;
      }
      // Step from beta toward z until the first passive variable hits zero.
      double alpha = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        if (passive[j] && z(jj) <= 0.0) {
          const double denom = beta(jj) - z(jj);
          if (denom > 0.0) alpha = std::min(alpha, beta(jj) / denom);
        }
      }
      beta += alpha * (z - beta);
      for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        if (passive[j] && beta(jj) <= tol) {
          passive[j] = false;
          beta(jj) = 0.0;
        }
      }
      if (iterations >= max_iterations) break;
    }
    if (entered_ok) std::fill(blocked.begin(), blocked.end(), false);
    w = x.transpose() * (y - x * beta);
  }

  NnlsResult out;
  out.beta = beta.cwiseMax(0.0);
  out.rss = (x * out.beta - y).squaredNorm();
  out.iterations = iterations;
  return out;
}

InterferenceModel fit_model(const InterferenceProfile& app,
                            std::span<const InterferenceProfile> co_runner_profiles,
                            const BenchmarkObservations& obs) {
  const auto d = assemble_design(app, co_runner_profiles, obs);
  const auto sol = nnls(d.x, d.y);
  InterferenceModel model;
  for (int k = 0; k < kModelTerms; ++k) model.beta[static_cast<std::size_t>(k)] = sol.beta(k);
  model.scope = obs.app_name;
  model.rss = sol.rss;
  model.n_obs = static_cast<std::size_t>(d.y.size());
  return model;
}

InterferenceModel fit_single_model(std::span<const TrainingSet> sets) {
  if (sets.empty()) throw DataError("pooled fit needs at least one training set");
  std::vector<DesignMatrix> parts;
  Eigen::Index rows = 0;
  for (const auto& s : sets) {
    parts.push_back(assemble_design(s.app, s.co_runners, s.observations));
    rows += parts.back().x.rows();
  }
  DesignMatrix all;
  all.x.resize(rows, kModelTerms);
  all.y.resize(rows);
  Eigen::Index r = 0;
  for (const auto& p : parts) {
    all.x.middleRows(r, p.x.rows()) = p.x;
    all.y.segment(r, p.y.size()) = p.y;
    r += p.x.rows();
  }
  const auto sol = nnls(all.x, all.y);
  InterferenceModel model;
  for (int k = 0; k < kModelTerms; ++k) model.beta[static_cast<std::size_t>(k)] = sol.beta(k);
  model.scope = "single";
  model.rss = sol.rss;
  model.n_obs = static_cast<std::size_t>(rows);
  return model;
}

int design_rank(const DesignMatrix& d) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.x);
  qr.setThreshold(1e-10);
  return static_cast<int>(qr.rank());
}

}  // namespace ifx
