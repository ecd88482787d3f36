#include "ifx/indices.hpp"

#include <algorithm>
#include <cmath>

#include "ifx/errors.hpp"

namespace ifx {
namespace {

double floored_log(double x, bool& floored) {
  if (!(x >= kLogFloor)) {
    floored = true;
    return std::log(kLogFloor);
  }
  return std::log(x);
}

void require_index_layout(const MeasurementModel& model, const ScoreMatrix& scores) {
  if (model.p != 8 || model.m != 2 || model.means.size() != 8 || scores.b.rows() != 2 ||
      scores.b.cols() != 8) {
    throw DataError("index model must have 8 observed variables and 2 factors");
  }
}

}  // namespace

EmpiricalCdf::EmpiricalCdf(std::vector<double> support, std::vector<double> positions)
    : support_(std::move(support)), positions_(std::move(positions)) {
  if (support_.size() != positions_.size() || support_.size() < 2) {
    throw DataError("cdf needs at least two support points with matching positions");
  }
  for (std::size_t k = 0; k < support_.size(); ++k) {
    if (!std::isfinite(support_[k]) || !(positions_[k] > 0.0 && positions_[k] < 1.0)) {
      throw DataError("cdf support must be finite and positions inside (0, 1)");
    }
    if (k > 0 && !(support_[k] > support_[k - 1] && positions_[k] > positions_[k - 1])) {
      throw DataError("cdf support and positions must be strictly ascending");
    }
  }
}

double EmpiricalCdf::operator()(double x) const {
  if (support_.empty() || std::isnan(x)) return 0.0;
  if (x < support_.front()) return 0.0;
  if (x > support_.back()) return 1.0;
  const auto it = std::upper_bound(support_.begin(), support_.end(), x);
  if (it == support_.end()) return positions_.back();
  const auto hi = static_cast<std::size_t>(it - support_.begin());
  const auto lo = hi - 1;
  const double w = (x - support_[lo]) / (support_[hi] - support_[lo]);
  return positions_[lo] + w * (positions_[hi] - positions_[lo]);
}

EmpiricalCdf build_cdf(std::span<const double> samples) {
  std::vector<double> sorted(samples.begin(), samples.end());
  for (const double x : sorted) {
    if (!std::isfinite(x)) throw DataError("cdf samples must be finite");
  }
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<double> support;
  std::vector<double> positions;
  std::size_t k = 0;
  while (k < sorted.size()) {
    std::size_t end = k;
    while (end < sorted.size() && sorted[end] == sorted[k]) ++end;
    // Mean of positions (j - 0.5) / n over 1-based ranks j = k+1 .. end.
    const double first = static_cast<double>(k) + 0.5;
    const double last = static_cast<double>(end) - 0.5;
    support.push_back(sorted[k]);
    positions.push_back(0.5 * (first + last) / n);
    k = end;
  }
  if (support.size() < 2) throw DataError("degenerate cdf: fewer than two distinct values");
  return EmpiricalCdf(std::move(support), std::move(positions));
}

double cdf_transform(const EmpiricalCdf& cdf, double x) { return cdf(x); }

RawIndexVector raw_indices(const VariableVector& v, const MeasurementModel& model,
                           const ScoreMatrix& scores) {
  require_index_layout(model, scores);
  RawIndexVector out;
  out.i1 = v.v[9];
  out.i2_hat = floored_log(v.v[8] + 1.0, out.floored);
  for (int i = 0; i < 4; ++i) {
    out.i3_hat += scores.b(0, i) * (floored_log(v.v[static_cast<std::size_t>(i)], out.floored) -
                                    model.means(i));
  }
  for (int i = 4; i < 8; ++i) {
    out.i4_hat += scores.b(1, i) * (floored_log(v.v[static_cast<std::size_t>(i)], out.floored) -
                                    model.means(i));
  }
  return out;
}

std::vector<RawIndexVector> raw_index_population(std::span<const RawTrace> traces,
                                                 const DatasetStats& stats,
                                                 const MeasurementModel& model,
                                                 const ScoreMatrix& scores) {
  std::vector<RawIndexVector> out;
  for (const auto& t : traces) {
    for (const auto& s : t.samples) {
      out.push_back(raw_indices(derive_variables(s, t.machine, stats), model, scores));
    }
  }
  return out;
}

IndexCdfs build_index_cdfs(std::span<const RawIndexVector> population) {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
  a.reserve(population.size());
  b.reserve(population.size());
  c.reserve(population.size());
  for (const auto& r : population) {
    a.push_back(r.i2_hat);
    b.push_back(r.i3_hat);
    c.push_back(r.i4_hat);
  }
  return {build_cdf(a), build_cdf(b), build_cdf(c)};
}

Eigen::MatrixXd log_variable_matrix(std::span<const RawTrace> traces, const DatasetStats& stats) {
  std::size_t rows = 0;
  for (const auto& t : traces) rows += t.samples.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), 8);
  Eigen::Index r = 0;
  for (const auto& t : traces) {
    for (const auto& s : t.samples) {
      const auto v = derive_variables(s, t.machine, stats);
      bool floored = false;
      for (int i = 0; i < 8; ++i) out(r, i) = floored_log(v.v[static_cast<std::size_t>(i)], floored);
      ++r;
    }
  }
  return out;
}

IndexTrace index_trace(const RawTrace& trace, const MachineSpec& machine,
                       const DatasetStats& stats, const MeasurementModel& model,
                       const ScoreMatrix& scores, const IndexCdfs& cdfs) {
  require_index_layout(model, scores);
  if (trace.samples.empty()) throw DataError("trace has no samples");
  IndexTrace out;
  out.app_name = trace.app_name;
  out.sampling_period_s = trace.sampling_period_s;
  out.rows.reserve(trace.samples.size());
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const auto v = derive_variables(trace.samples[k], machine, stats);
    const auto raw = raw_indices(v, model, scores);
    if (raw.floored || v.zero_instructions) out.flagged_windows.push_back(k);
    out.rows.push_back({raw.i1, cdfs.i2(raw.i2_hat), cdfs.i3(raw.i3_hat), cdfs.i4(raw.i4_hat)});
  }
  return out;
}

IndexTrace index_trace(const RawTrace& trace, const IndexCalibration& c) {
  return index_trace(trace, trace.machine, c.stats, c.model, c.scores, c.cdfs);
}

IndexCalibration calibrate(std::span<const RawTrace> reference, MeasurementModel model,
                           ScoreMatrix scores) {
  IndexCalibration c;
  c.stats = compute_dataset_stats(reference);
  const auto population = raw_index_population(reference, c.stats, model, scores);
  c.cdfs = build_index_cdfs(population);
  c.model = std::move(model);
  c.scores = std::move(scores);
  return c;
}

IndexCalibration fit_calibration(std::span<const RawTrace> reference) {
  const auto stats = compute_dataset_stats(reference);
  const Eigen::MatrixXd logs = log_variable_matrix(reference, stats);
  auto fit = fit_measurement_model(logs, {0, 0, 0, 0, 1, 1, 1, 1});
  auto scores = score_matrix(fit.model, CovarianceMatrix::sample(logs));
  return calibrate(reference, std::move(fit.model), std::move(scores));
}

}  // namespace ifx
