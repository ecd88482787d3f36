#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ifx/trace.hpp"

namespace ifx::testing {

// Plausible random counters. Every miss count stays below its reference
// count and the last window is partial when `partial` is set.
inline RawTrace random_trace(const std::string& app, std::size_t windows, double period_s,
                             std::uint64_t seed, bool partial = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RawTrace t;
  t.app_name = app;
  t.machine = {4, 3500.0, "bench"};
  t.sampling_period_s = period_s;
  for (std::size_t k = 0; k < windows; ++k) {
    RawSample s;
    s.window_index = k;
    s.window_seconds = (partial && k + 1 == windows) ? 0.5 * period_s : period_s;
    const double scale = s.window_seconds / period_s;
    const auto draw = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
    s.instructions = static_cast<std::uint64_t>(scale * draw(2e9, 8e9));
    s.cycles = static_cast<std::uint64_t>(scale * draw(0.2, 1.0) * period_s * 3.5e9 * 4.0);
    const double ins = static_cast<double>(s.instructions);
    s.cache_refs = static_cast<std::uint64_t>(ins * std::exp(draw(-7.0, -4.5)));
    s.branches = static_cast<std::uint64_t>(ins * std::exp(draw(-2.5, -1.6)));
    s.llc_loads = static_cast<std::uint64_t>(ins * std::exp(draw(-7.5, -5.0)));
    s.llc_stores = static_cast<std::uint64_t>(ins * std::exp(draw(-9.5, -7.5)));
    s.cache_misses = static_cast<std::uint64_t>(static_cast<double>(s.cache_refs) * std::exp(draw(-3.0, -1.0)));
    s.branch_misses = static_cast<std::uint64_t>(static_cast<double>(s.branches) * std::exp(draw(-4.5, -3.0)));
    s.llc_load_misses = static_cast<std::uint64_t>(static_cast<double>(s.llc_loads) * std::exp(draw(-3.0, -1.0)));
    s.llc_store_misses = static_cast<std::uint64_t>(static_cast<double>(s.llc_stores) * std::exp(draw(-2.5, -1.0)));
    s.page_faults = static_cast<std::uint64_t>(draw(0.0, 400.0));
    t.samples.push_back(s);
  }
  t.total_time_s = period_s * (static_cast<double>(windows) - (partial ? 0.5 : 0.0));
  return t;
}

// Co-run of `solo` that progresses `slowdown` times slower throughout,
// sampled with the same period. Instructions beyond the solo total are
// not retired, so the last window may be partial.
inline RawTrace slowed_trace(const RawTrace& solo, double slowdown) {
  std::vector<double> times = {0.0};
  std::vector<double> cum = {0.0};
  for (const auto& s : solo.samples) {
    times.push_back(times.back() + s.window_seconds);
    cum.push_back(cum.back() + static_cast<double>(s.instructions));
  }
  const auto progress = [&](double solo_t) {
    if (solo_t >= times.back()) return cum.back();
    const auto it = std::upper_bound(times.begin(), times.end(), solo_t);
    const auto hi = static_cast<std::size_t>(it - times.begin());
    const double w = (solo_t - times[hi - 1]) / (times[hi] - times[hi - 1]);
    return cum[hi - 1] + w * (cum[hi] - cum[hi - 1]);
  };
  RawTrace out = solo;
  out.samples.clear();
  const double total = times.back() * slowdown;
  const double s = solo.sampling_period_s;
  std::uint64_t done = 0;
  const auto target = static_cast<std::uint64_t>(cum.back());
  for (std::size_t k = 0; static_cast<double>(k) * s < total - 1e-9; ++k) {
    RawSample w = solo.samples[std::min(k, solo.samples.size() - 1)];
    const double end = std::min(total, static_cast<double>(k + 1) * s);
    w.window_index = k;
    w.window_seconds = end - static_cast<double>(k) * s;
    const auto reached = end >= total ? target : static_cast<std::uint64_t>(std::llround(progress(end / slowdown)));
    w.instructions = reached - done;
    done = reached;
    out.samples.push_back(w);
  }
  out.total_time_s = total;
  return out;
}

// n draws of x = loadings * f + means + e with f ~ N(0, I) and
// e ~ N(0, diag(psi)).
inline Eigen::MatrixXd sample_factor_model(const Eigen::MatrixXd& loadings, const Eigen::VectorXd& psi,
                                           const Eigen::VectorXd& means, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const auto p = loadings.rows();
  const auto m = loadings.cols();
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd f(m);
  for (int r = 0; r < n; ++r) {
    for (Eigen::Index j = 0; j < m; ++j) f(j) = z(rng);
    for (Eigen::Index i = 0; i < p; ++i) {
      x(r, i) = loadings.row(i).dot(f) + means(i) + std::sqrt(psi(i)) * z(rng);
    }
  }
  return x;
}

}  // namespace ifx::testing
