#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ifx {

/// Error metrics of an interference estimate against measurements.
///   me  = mean(delta - delta_hat)
///   mse = mean((delta - delta_hat)^2)
///   acc = 1 - mean(|delta - delta_hat| / delta)   (may be negative)
///   epsilon = n * s * me = sum(delta) * s - sum(delta_hat) * s
struct EvaluationReport {
  double me = 0.0;
  double mse = 0.0;
  double acc = 1.0;
  double epsilon = 0.0;
  std::size_t n = 0;
  double sampling_period_s = 0.0;
};

/// Throws DataError on length mismatch, empty input or non-positive
/// measured deltas.
EvaluationReport evaluate(std::span<const double> delta, std::span<const double> delta_hat,
                          double sampling_period_s);

struct RatioRow {
  std::string app;
  double solo_s = 0.0;
  std::vector<double> co_run_s;
  std::vector<double> ratio;  // co_run_s / solo_s, unrounded
};

struct RatioTable {
  std::vector<std::string> co_runners;
  std::vector<RatioRow> rows;
};

/// Overall slowdown T_AB / T_A per application and co-runner. Throws
/// DataError on non-positive times or ragged input.
RatioTable ratio_table(std::span<const std::string> apps, std::span<const double> solo_times,
                       const std::vector<std::vector<double>>& co_run_times,
                       std::vector<std::string> co_runners);

/// Aligned text with times and ratios to two decimals.
std::string render_ratio_table_text(const RatioTable& table);
std::string render_ratio_table_csv(const RatioTable& table);

/// One evaluated pairing A (row) next to B (column).
struct PairEvaluation {
  std::string app;
  std::string co_runner;
  EvaluationReport report;
  double measured_s = 0.0;
  double estimated_s = 0.0;
};

/// ME / MSE / Acc grid: one block of three lines per application, one
/// column per co-runner plus a Total column (mean over the row's pairs);
/// missing pairs print "-". A final Total block averages each column.
std::string render_metrics_grid_text(std::span<const PairEvaluation> pairs);
std::string render_metrics_grid_csv(std::span<const PairEvaluation> pairs);

/// Measured / estimated execution-time grid with "Mea." and "Est." lines.
std::string render_times_grid_text(std::span<const PairEvaluation> pairs);
std::string render_times_grid_csv(std::span<const PairEvaluation> pairs);

/// Plot data (t, delta, delta_hat) with t at interval upper bounds.
std::string render_plot_csv(std::span<const double> delta, std::span<const double> delta_hat,
                            double sampling_period_s);

}  // namespace ifx
