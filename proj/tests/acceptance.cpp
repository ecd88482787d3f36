// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ifx/bench.hpp"
#include "ifx/cfa.hpp"
#include "ifx/errors.hpp"
#include "ifx/evaluation.hpp"
#include "ifx/predictor.hpp"
#include "ifx/profile.hpp"
#include "ifx/regression.hpp"
#include "ifx/serialize.hpp"
#include "ifx/synth.hpp"
#include "nnls_oracle.hpp"
#include "support.hpp"

using namespace ifx;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// ------------------------------------------------------------------ 1

struct SyntheticSet {
  InterferenceProfile app;
  std::vector<InterferenceProfile> benches;
  BenchmarkObservations obs;
};

SyntheticSet make_set(const synth::GroundTruth& truth, double duration, double period, std::uint64_t seed) {
  SyntheticSet s;
  s.app = synth::gen_profile(synth::phased_app("app", duration, period, seed));
  const double bench_len = duration * 1.5;
  s.benches = {synth::gen_profile(synth::cpu_bound_app("pov-ray", bench_len, period)),
               synth::gen_profile(synth::io_heavy_app("iozone", bench_len, period)),
               synth::gen_profile(synth::memory_heavy_app("stream", bench_len, period))};
  s.obs.app_name = "app";
  s.obs.sampling_period_s = period;
  s.obs.solo_time_s = duration;
  for (std::size_t j = 0; j < s.benches.size(); ++j) {
    s.obs.columns.push_back(synth::simulate_cosched(s.app, s.benches[j], truth, seed * 100 + j));
  }
  return s;
}

Outcome synthetic_recovery() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  synth::GroundTruth truth;
  truth.beta = {0.8, 0.3, 0.2, 0.4, 0.25, 0.15, 0.35, 0.3, 0.2};

  // Noiseless.
  const auto exact = make_set(truth, 200.0, 2.0, 1);
  const auto rank = design_rank(assemble_design(exact.app, exact.benches, exact.obs));
  o.require(rank == 9, "noiseless design rank " + std::to_string(rank));
  const auto m = fit_model(exact.app, exact.benches, exact.obs);
  double worst = 0.0;
  for (std::size_t k = 0; k < kModelTerms; ++k) worst = std::max(worst, std::fabs(m.beta[k] - truth.beta[k]));
  o.require(worst <= 1e-6, "noiseless beta error " + num(worst));
  const auto other = synth::gen_profile(synth::phased_app("other", 150.0, 2.0, 9));
  std::vector<InterferenceProfile> partners = exact.benches;
  partners.push_back(other);
  double worst_time = 0.0;
  for (const auto& b : partners) {
    const auto measured = synth::simulate_cosched(exact.app, b, truth, 5).co_run_time_s;
    const auto est = estimate_execution_time(m, exact.app, b).total_time_s;
    worst_time = std::max(worst_time, std::fabs(est - measured) / measured);
  }
  o.require(worst_time <= 1e-4, "noiseless time error " + num(worst_time));

  // Noisy: sigma 0.05. Benchmark archetypes hold I1 and I4 constant, which
  // leaves beta5 and beta8 with standard errors near 200%, so this half uses
  // six co-runners with varied sinusoids over 2000 s (12000 observations,
  // every standard error below 2.5% of its coefficient).
  truth.noise_sigma = 0.05;
  const double noisy_len = 2000.0;
  SyntheticSet noisy;
  noisy.app = synth::gen_profile(synth::phased_app("app", noisy_len, 1.0, 2));
  noisy.obs.app_name = "app";
  noisy.obs.sampling_period_s = 1.0;
  noisy.obs.solo_time_s = noisy_len;
  for (int k = 0; k < 6; ++k) {
    synth::AppSpec b;
    b.name = "co" + std::to_string(k);
    b.duration_s = 1.5 * noisy_len;
    b.sampling_period_s = 1.0;
    const double f = k;
    b.shapes = {synth::Sinusoid{0.5, 0.4, 23 + 11 * f, 0.3 * f}, synth::Sinusoid{0.5, 0.4, 37 + 7 * f, 1 + 0.5 * f},
                synth::Sinusoid{0.5, 0.4, 53 + 5 * f, 2 + 0.7 * f}, synth::Sinusoid{0.5, 0.4, 71 + 3 * f, 0.9 * f}};
    noisy.benches.push_back(synth::gen_profile(b));
    noisy.obs.columns.push_back(synth::simulate_cosched(noisy.app, noisy.benches.back(), truth, 7 + k));
  }
  const auto design = assemble_design(noisy.app, noisy.benches, noisy.obs);
  const Eigen::MatrixXd info_inv = (design.x.transpose() * design.x).inverse();
  double worst_se = 0.0;
  for (std::size_t k = 0; k < kModelTerms; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    worst_se = std::max(worst_se, truth.noise_sigma * std::sqrt(info_inv(i, i)) / truth.beta[k]);
  }
  o.require(worst_se <= 0.025, "noisy design underpowered, relative SE " + num(worst_se));
  const auto mn = fit_model(noisy.app, noisy.benches, noisy.obs);
  o.require(mn.n_obs >= 300, "too few noisy observations");
  double worst_rel = 0.0;
  std::size_t worst_k = 0;
  for (std::size_t k = 0; k < kModelTerms; ++k) {
    const double rel = std::fabs(mn.beta[k] - truth.beta[k]) / truth.beta[k];
    if (rel > worst_rel) {
      worst_rel = rel;
      worst_k = k;
    }
  }
  o.require(worst_rel <= 0.10, "noisy beta relative error " + num(worst_rel) + " at beta" + std::to_string(worst_k) +
                                   " (" + num(mn.beta[worst_k]) + " vs " + num(truth.beta[worst_k]) + ")");
  double worst_noisy_time = 0.0;
  for (std::size_t j = 0; j < noisy.benches.size(); ++j) {
    const auto est = estimate_execution_time(mn, noisy.app, noisy.benches[j]).total_time_s;
    const auto measured = noisy.obs.columns[j].co_run_time_s;
    worst_noisy_time = std::max(worst_noisy_time, std::fabs(est - measured) / measured);
  }
  o.require(worst_noisy_time <= 0.02, "noisy time error " + num(worst_noisy_time));
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 10.0, "runtime " + num(elapsed) + " s");
  if (o.pass) {
    o.detail = "beta err " + num(worst) + ", time err " + num(worst_time) + "; noisy beta rel " + num(worst_rel) + " (SE " + num(worst_se) + ")" +
               ", time " + num(worst_noisy_time) + "; " + num(elapsed) + " s";
  }
  return o;
}

// ------------------------------------------------------------------ 2

Outcome nnls_oracle() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240607);
  std::normal_distribution<double> z(0.0, 1.0);
  double worst_obj = 0.0;
  double worst_kkt = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int cols = 1 + trial % 10;
    const int rows = cols + static_cast<int>(rng() % 20);
    Eigen::MatrixXd x(rows, cols);
    Eigen::VectorXd y(rows);
    for (int i = 0; i < rows; ++i) {
      y(i) = z(rng);
      for (int j = 0; j < cols; ++j) x(i, j) = z(rng);
    }
    const auto r = nnls(x, y);
    o.require((r.beta.array() >= 0.0).all(), "negative coefficient in trial " + std::to_string(trial));
    const double brute = testing::brute_force_nnls(x, y);
    worst_obj = std::max(worst_obj, std::fabs(r.rss - brute));
    worst_kkt = std::max(worst_kkt, testing::kkt_residual(x, y, r.beta));
  }
  o.require(worst_obj <= 1e-6, "objective gap " + num(worst_obj));
  o.require(worst_kkt <= 1e-8, "KKT residual " + num(worst_kkt));
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 30.0, "runtime " + num(elapsed) + " s");
  if (o.pass) o.detail = "max gap " + num(worst_obj) + ", max KKT " + num(worst_kkt) + "; " + num(elapsed) + " s";
  return o;
}

// ------------------------------------------------------------------ 3

Outcome cfa_recovery() {
  Outcome o;
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(8, 2);
  lambda.col(0).head(4) << 0.9, 0.7, 0.8, 0.6;
  lambda.col(1).tail(4) << 0.8, 0.5, 0.7, 0.9;
  Eigen::VectorXd psi(8);
  psi << 0.4, 0.5, 0.3, 0.6, 0.35, 0.5, 0.45, 0.3;
  const auto x = testing::sample_factor_model(lambda, psi, Eigen::VectorXd::Zero(8), 10000, 7);
  const std::vector<int> structure = {0, 0, 0, 0, 1, 1, 1, 1};
  FitResult fit;
  try {
    fit = fit_measurement_model(x, structure);
  } catch (const DataError& e) {
    o.require(false, std::string("fit failed: ") + e.what());
    return o;
  }
  double worst = 0.0;
  for (int i = 0; i < 8; ++i) {
    const int f = structure[static_cast<std::size_t>(i)];
    worst = std::max(worst, std::fabs(fit.model.loadings(i, f) - lambda(i, f)) / std::fabs(lambda(i, f)));
  }
  o.require(worst <= 0.05, "loading error " + num(worst));

  const auto s = CovarianceMatrix::sample(x).matrix();
  MeasurementModel truth;
  truth.p = 8;
  truth.m = 2;
  truth.loadings = lambda;
  truth.factor_cov = Eigen::MatrixXd::Identity(2, 2);
  truth.unique_var = psi;
  const double f_true = ml_discrepancy(implied_covariance(truth), s);
  const double gap = std::fabs(fit.discrepancy - f_true);
  o.require(gap <= 1e-3, "F_ML gap " + num(gap) + " (fitted " + num(fit.discrepancy) + ", generating " +
                             num(f_true) + ")");

  MeasurementModel one;
  one.p = 2;
  one.m = 1;
  one.loadings = Eigen::MatrixXd::Ones(2, 1);
  one.factor_cov = Eigen::MatrixXd::Identity(1, 1);
  one.unique_var = Eigen::VectorXd::Ones(2);
  const auto b = score_matrix(one, CovarianceMatrix(implied_covariance(one))).b;
  const double b_err = std::max(std::fabs(b(0, 0) - 1.0 / 3.0), std::fabs(b(0, 1) - 1.0 / 3.0));
  o.require(b_err <= 1e-9, "score matrix error " + num(b_err));
  if (o.pass) o.detail = "loading err " + num(worst) + ", F_ML gap " + num(gap) + ", B err " + num(b_err);
  return o;
}

// ------------------------------------------------------------------ 4

Outcome preset_fidelity() {
  Outcome o;
  const auto [m, b] = preset_index_model();
  const double lambda[8][2] = {{2.202, 0}, {0.179, 0}, {2.342, 0}, {2.011, 0},
                               {0, 1.315}, {0, -0.259}, {0, 1.241}, {0, 1.483}};
  const double mu[8] = {-6.079, -2.049, -6.448, -8.734, -2.051, -3.796, -2.083, -1.857};
  const double bb[2][8] = {{1, -0.06, -0.48, -0.04, 0, 0, 0, 0}, {0, 0, 0, 0, 1.40, 0.05, -0.46, -0.14}};
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 2; ++j) o.require(m.loadings(i, j) == lambda[i][j], "lambda mismatch");
    o.require(m.means(i) == mu[i], "mu mismatch");
    for (int r = 0; r < 2; ++r) o.require(b.b(r, i) == bb[r][i], "B mismatch");
  }
  o.require(m.factor_cov == Eigen::MatrixXd::Identity(2, 2), "phi is not the identity");

  const auto text = io::dump(io::to_json(m, b));
  const auto [m2, b2] = io::measurement_model_from_json(io::parse(text, "preset"));
  const auto bits_equal = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& c) {
    return a.rows() == c.rows() && a.cols() == c.cols() &&
           std::memcmp(a.data(), c.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
  };
  o.require(bits_equal(m.loadings, m2.loadings), "lambda changed in JSON");
  o.require(bits_equal(m.factor_cov, m2.factor_cov), "phi changed in JSON");
  o.require(bits_equal(m.means, m2.means), "mu changed in JSON");
  o.require(bits_equal(m.unique_var, m2.unique_var), "psi changed in JSON");
  o.require(bits_equal(b.b, b2.b), "B changed in JSON");
  o.require(io::dump(io::to_json(m2, b2)) == text, "JSON text differs after round trip");
  if (o.pass) o.detail = "lambda11 2.202, mu4 -8.734, B25 1.40; JSON bit-identical";
  return o;
}

// ------------------------------------------------------------------ 5

Outcome ratio_fixtures() {
  Outcome o;
  struct Row {
    const char* app;
    double solo;
    double co[3];
    double printed[3];
  };
  const Row rows[] = {
      {"metis", 86.01, {114.37, 114.22, 193.67}, {1.33, 1.33, 2.25}},
      {"montage", 374.08, {397.63, 421.73, 401.41}, {1.06, 1.13, 1.07}},
      {"bzip2", 64.52, {69.05, 66.77, 78.75}, {1.07, 1.03, 1.22}},
      {"pbzip2", 20.0, {37.94, 20.26, 36.16}, {1.9, 1.01, 1.81}},
      {"blastn", 155.25, {171.26, 157.98, 170.71}, {1.1, 1.02, 1.1}},
      {"blastx", 180.0, {190.02, 184.33, 217.55}, {1.06, 1.02, 1.21}},
  };
  std::vector<std::string> apps;
  std::vector<double> solo;
  std::vector<std::vector<double>> co;
  for (const auto& r : rows) {
    apps.push_back(r.app);
    solo.push_back(r.solo);
    co.push_back({r.co[0], r.co[1], r.co[2]});
  }
  const auto t = ratio_table(apps, solo, co, {"pov-ray", "iozone", "stream"});
  int checked = 0;
  double worst = 0.0;
  for (std::size_t a = 0; a < t.rows.size(); ++a) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double err = std::fabs(t.rows[a].ratio[j] - rows[a].printed[j]);
      worst = std::max(worst, err);
      o.require(err <= 0.01, std::string(rows[a].app) + " ratio " + num(t.rows[a].ratio[j]));
      ++checked;
    }
  }
  const auto csv = render_ratio_table_csv(t);
  o.require(csv.find("metis,86.01,114.37,1.33,114.22,1.33,193.67,2.25") != std::string::npos,
            "rendered metis row");
  o.require(csv.find("pbzip2,20.00,37.94,1.90") != std::string::npos, "rendered pbzip2 row");
  if (o.pass) o.detail = std::to_string(checked) + " ratios, max deviation " + num(worst);
  return o;
}

// ------------------------------------------------------------------ 6

Outcome telescoping() {
  Outcome o;
  std::vector<BenchmarkObservations> all;
  // From traces.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto solo = testing::random_trace("a", 5 + seed * 3, 0.5 * static_cast<double>(seed), seed, seed % 2 == 1);
    std::vector<RawTrace> coruns;
    for (const double f : {1.0, 1.07, 1.9, 2.25}) coruns.push_back(testing::slowed_trace(solo, f));
    const std::vector<std::string> names = {"b1", "b2", "b3", "b4"};
    all.push_back(build_observations(solo, coruns, names));
  }
  // From the synthetic oracle.
  synth::GroundTruth truth;
  truth.beta = {0.8, 0.3, 0.2, 0.4, 0.25, 0.15, 0.35, 0.3, 0.2};
  truth.noise_sigma = 0.1;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) all.push_back(make_set(truth, 37.0 * static_cast<double>(seed), 1.5, seed).obs);

  double worst_sum = 0.0;
  std::size_t columns = 0;
  for (const auto& obs : all) {
    for (const auto& c : obs.columns) {
      double sum = 0.0;
      for (const double d : c.delta) sum += d * obs.sampling_period_s;
      worst_sum = std::max(worst_sum, std::fabs(sum - c.co_run_time_s));
      ++columns;
    }
  }
  o.require(worst_sum <= 1e-9, "sum of deltas differs from co-run time by " + num(worst_sum));

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.2, 4.0);
  double worst_eps = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 200;
    const double s = u(rng);
    std::vector<double> d(n);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = u(rng);
      h[i] = u(rng);
    }
    double measured = 0.0;
    double estimated = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      measured += d[i] * s;
      estimated += h[i] * s;
    }
    worst_eps = std::max(worst_eps, std::fabs(evaluate(d, h, s).epsilon - (measured - estimated)));
  }
  o.require(worst_eps <= 1e-9, "epsilon differs from the time difference by " + num(worst_eps));
  if (o.pass) {
    o.detail = std::to_string(columns) + " columns, max |sum - T| " + num(worst_sum) + "; max epsilon gap " +
               num(worst_eps);
  }
  return o;
}

// ------------------------------------------------------------------ 7

RawTrace fuzzed_trace(std::mt19937_64& rng, std::size_t windows) {
  auto t = testing::random_trace("fuzz", windows, 1.0, rng());
  std::uniform_int_distribution<int> pick(0, 9);
  for (auto& s : t.samples) {
    switch (pick(rng)) {
      case 0: s.instructions = 0; break;
      case 1: s.cache_refs = s.cache_misses = 0; break;
      case 2: s.llc_stores = s.llc_store_misses = 0; break;
      case 3: s.cycles = 0; break;
      case 4: s.cycles = ~0ULL / 4; break;
      case 5: s.page_faults = 1000000; break;
      case 6: s.cache_misses = s.cache_refs; break;
      case 7: s.instructions = 1; break;
      default: break;
    }
  }
  return t;
}

Outcome index_properties() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> z(0.0, 3.0);
  std::vector<double> sample(2000);
  for (auto& x : sample) x = std::round(z(rng) * 4.0) / 4.0;  // plenty of ties
  const auto cdf = build_cdf(sample);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::size_t violations = 0;
  for (int k = 0; k < 100000; ++k) {
    double a = u(rng);
    double b = u(rng);
    if (a > b) std::swap(a, b);
    const double fa = cdf_transform(cdf, a);
    const double fb = cdf_transform(cdf, b);
    if (!(fa <= fb) || fa < 0.0 || fb > 1.0) ++violations;
  }
  o.require(violations == 0, std::to_string(violations) + " monotonicity/range violations");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t knot_misses = 0;
  for (int trial = 0; trial < 200; ++trial) {
    InterferenceProfile p;
    p.sampling_period_s = 0.01 + 9.99 * unit(rng);
    const std::size_t n = 1 + rng() % 60;
    for (std::size_t i = 1; i <= n; ++i) {
      p.y.push_back({unit(rng), unit(rng), unit(rng), unit(rng)});
      p.instructions.push_back(i);
    }
    p.total_time_s = static_cast<double>(n) * p.sampling_period_s;
    for (std::size_t i = 1; i <= n; ++i) {
      for (int j = 1; j <= 4; ++j) {
        if (eval_profile(p, j, p.knot_time(i)) != p.y[i - 1][static_cast<std::size_t>(j - 1)]) ++knot_misses;
      }
    }
  }
  o.require(knot_misses == 0, std::to_string(knot_misses) + " inexact knot evaluations");

  std::vector<RawTrace> ref;
  for (int k = 0; k < 4; ++k) ref.push_back(fuzzed_trace(rng, 50));
  auto [m, b] = preset_index_model();
  const auto cal = calibrate(ref, m, b);
  std::size_t outside = 0;
  std::size_t rows = 0;
  for (int k = 0; k < 200; ++k) {
    const auto t = fuzzed_trace(rng, 1 + rng() % 40);
    for (const auto& r : index_trace(t, cal).rows) {
      ++rows;
      for (const double v : r.as_array()) {
        if (!(v >= 0.0 && v <= 1.0)) ++outside;
      }
    }
  }
  o.require(outside == 0, std::to_string(outside) + " index values outside [0, 1]");
  if (o.pass) o.detail = "1e5 pairs monotone, knots exact, " + std::to_string(rows) + " fuzzed rows in [0,1]^4";
  return o;
}

// ------------------------------------------------------------------ 8

Outcome sampling_monotonicity() {
  Outcome o;
  using synth::Constant;
  using synth::Sinusoid;
  synth::AppSpec a;
  a.name = "app";
  a.duration_s = 120.0;
  a.sampling_period_s = 1.0;
  a.shapes = {Sinusoid{0.5, 0.4, 90.0, 0.0}, Constant{0.3}, Sinusoid{0.45, 0.3, 55.0, 1.0}, Constant{0.2}};
  synth::AppSpec b;
  b.name = "co";
  b.duration_s = 200.0;
  b.sampling_period_s = 1.0;
  b.shapes = {Sinusoid{0.6, 0.3, 75.0, 0.5}, Constant{0.1}, Constant{0.4}, Sinusoid{0.5, 0.35, 40.0, 2.0}};
  InterferenceModel model;
  model.beta = {1.0, 0.3, 0.1, 0.2, 0.05, 0.4, 0.1, 0.15, 0.25};

  // Closed-form integral of the continuous linear interference function.
  const auto integral = [](const synth::Shape& shape, double t) {
    if (const auto* c = std::get_if<Constant>(&shape)) return c->value * t;
    const auto& s = std::get<Sinusoid>(shape);
    const double w = 2.0 * std::numbers::pi / s.period_s;
    return s.mean * t + s.amplitude / w * (std::cos(s.phase) - std::cos(w * t + s.phase));
  };
  const double t_a = a.duration_s;
  double exact = model.beta[0] * t_a;
  for (std::size_t j = 0; j < 4; ++j) {
    exact += model.beta[1 + j] * integral(a.shapes[j], t_a);
    exact += model.beta[5 + j] * integral(b.shapes[j], t_a);
  }

  const auto pa = synth::gen_profile(a);
  const auto pb = synth::gen_profile(b);
  const std::vector<double> periods = {8, 4, 2, 1};
  const auto rows = sampling_sensitivity(model, pa, pb, periods, SamplingScenario::kCoarsePrediction);
  std::string trail;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    const double err = std::fabs(r.estimate_s - exact);
    trail += (trail.empty() ? "" : ", ") + num(r.period_s) + " s: " + num(err);
    o.require(err <= prev, "error grows at s = " + num(r.period_s) + " (" + trail + ")");
    prev = err;
  }
  if (o.pass) o.detail = "abs error " + trail;
  return o;
}

// ------------------------------------------------------------------ 9

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

// Runs the full command sequence inside `dir`; returns false on any
// non-zero exit.
bool run_pipeline(const fs::path& dir, std::string& failure) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string exe = IFX_BINARY;
  const auto solo = testing::random_trace("metis", 24, 5.0, 11, true);
  std::ofstream(dir / "solo.csv") << render_trace_csv(solo);
  std::ofstream(dir / "ref.csv") << render_trace_csv(testing::random_trace("ref", 60, 5.0, 12));
  std::ofstream(dir / "pov.csv") << render_trace_csv(testing::slowed_trace(solo, 1.33));
  std::ofstream(dir / "ioz.csv") << render_trace_csv(testing::slowed_trace(solo, 1.12));
  std::ofstream(dir / "str.csv") << render_trace_csv(testing::slowed_trace(solo, 2.25));

  const std::string scenario = std::string(IFX_TEST_DATA_DIR) + "/scenario.json";
  // Paths are relative to the run directory so both runs see identical
  // arguments.
  const auto d = [](const std::string& rel) { return quote(rel); };
  const std::vector<std::pair<std::string, std::string>> steps = {
      {"profile", "profile --trace " + d("solo.csv") + " --model preset --reference " + d("ref.csv") +
                      " --out " + d("solo.profile.json") + " --calibration-out " + d("cal.json")},
      {"profile-fit", "profile --trace " + d("solo.csv") + " --model fit --reference " + d("ref.csv") +
                          " --out " + d("solo.fit.profile.json") + " --sA 10"},
      {"bench", "bench --jobs 3 --solo " + d("solo.csv") + " --corun pov-ray=" + d("pov.csv") +
                    " --corun iozone=" + d("ioz.csv") + " --corun stream=" + d("str.csv") + " --out " +
                    d("metis.obs.json")},
      {"synth", "synth --scenario " + quote(scenario) + " --out-dir " + d("s")},
      {"fit", "fit --jobs 2 --scenario " + d("s/compress") + " --scenario " + d("s/align") + " --out-dir " +
                  d("models")},
      {"fit-single", "fit --single --scenario " + d("s/compress") + " --scenario " + d("s/align") + " --out " +
                         d("single.model.json")},
      {"predict", "predict --model " + d("models/compress.model.json") + " --app " +
                      d("s/profiles/compress.profile.json") + " --with " + d("s/profiles/align.profile.json") +
                      " --periods 8,4,2,1 --out " + d("pred.json") + " --csv " + d("pred.csv")},
      {"predict-delay", "predict --delay 3 --model " + d("single.model.json") + " --app " +
                            d("s/profiles/align.profile.json") + " --with " + d("s/profiles/compress.profile.json") +
                            " --out " + d("pred_k3.json")},
      {"eval", "eval --prediction " + d("pred.json") + " --obs " + d("s/pairs/compress__align.obs.json") +
                   " --out " + d("eval.json") + " --plot-csv " + d("plot.csv")},
      {"report", "report --obs " + d("s/compress/observations.json") + " --obs " +
                     d("s/align/observations.json") + " --eval " + d("eval.json") + " --out-dir " + d("report")},
      {"report-traces", "report --obs " + d("metis.obs.json") + " --out-dir " + d("report_traces")},
  };
  for (const auto& [name, args] : steps) {
    const std::string cmd = "cd " + quote(dir) + " && " + quote(exe) + " " + args + " > " + d(name + ".stdout") +
                            " 2> " + d(name + ".stderr");
    if (std::system(cmd.c_str()) != 0) {
      failure = name + " failed: " + slurp(dir / (name + ".stderr"));
      return false;
    }
  }
  return true;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return files;
}

Outcome cli_determinism() {
  Outcome o;
  const auto base = fs::temp_directory_path() / "ifx_acceptance_cli";
  std::string failure;
  if (!run_pipeline(base / "a", failure) || !run_pipeline(base / "b", failure)) {
    o.require(false, failure);
    return o;
  }
  const auto a = snapshot(base / "a");
  const auto b = snapshot(base / "b");
  o.require(a.size() == b.size(), "different file sets");
  for (const auto& [name, content] : a) {
    const auto it = b.find(name);
    o.require(it != b.end() && it->second == content, name + " differs between runs");
  }
  if (o.pass) o.detail = std::to_string(a.size()) + " files byte-identical over 7 subcommands";
  fs::remove_all(base);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 synthetic end-to-end recovery", synthetic_recovery},
      {"2 NNLS matches brute-force active sets", nnls_oracle},
      {"3 CFA recovery and analytic score matrix", cfa_recovery},
      {"4 reference preset fidelity and JSON round trip", preset_fidelity},
      {"5 slowdown ratio fixtures", ratio_fixtures},
      {"6 telescoping identities", telescoping},
      {"7 CDF and index properties", index_properties},
      {"8 sampling-period error monotonicity", sampling_monotonicity},
      {"9 CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << "[" << name << "] " << o.detail << std::endl;
    if (!o.pass) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
