#include "ifx/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "ifx/errors.hpp"

namespace ifx {
namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  // Avoid "-0.00".
  if (std::string_view(buf) == "-0.00") return "0.00";
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

template <class Get>
std::vector<std::string> distinct(std::span<const PairEvaluation> pairs, Get get) {
  std::vector<std::string> out;
  for (const auto& p : pairs) {
    const std::string& name = get(p);
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

struct Grid {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::map<std::pair<std::string, std::string>, const PairEvaluation*> cells;
};

Grid make_grid(std::span<const PairEvaluation> pairs) {
  Grid g;
  g.rows = distinct(pairs, [](const PairEvaluation& p) -> const std::string& { return p.app; });
  g.cols = distinct(pairs, [](const PairEvaluation& p) -> const std::string& { return p.co_runner; });
  for (const auto& p : pairs) g.cells[{p.app, p.co_runner}] = &p;
  return g;
}

using Metric = std::function<double(const PairEvaluation&)>;

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Rows of cells: header, then for each row name and metric one line.
std::vector<std::vector<std::string>> metric_cells(const Grid& g,
                                                   const std::vector<std::pair<std::string, Metric>>& metrics,
                                                   bool totals) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> header = {"", ""};
  header.insert(header.end(), g.cols.begin(), g.cols.end());
  if (totals) header.push_back("Total");
  out.push_back(header);
  for (const auto& r : g.rows) {
    for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
      std::vector<std::string> line = {mi == 0 ? r : "", metrics[mi].first};
      std::vector<double> seen;
      for (const auto& c : g.cols) {
        const auto it = g.cells.find({r, c});
        if (it == g.cells.end()) {
          line.push_back("-");
        } else {
          const double v = metrics[mi].second(*it->second);
          seen.push_back(v);
          line.push_back(fixed2(v));
        }
      }
      if (totals) {
        const auto m = mean_of(seen);
        line.push_back(m ? fixed2(*m) : "-");
      }
      out.push_back(line);
    }
  }
  if (totals) {
    for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
      std::vector<std::string> line = {mi == 0 ? "Total" : "", metrics[mi].first};
      std::vector<double> all;
      for (const auto& c : g.cols) {
        std::vector<double> seen;
        for (const auto& r : g.rows) {
          const auto it = g.cells.find({r, c});
          if (it != g.cells.end()) seen.push_back(metrics[mi].second(*it->second));
        }
        all.insert(all.end(), seen.begin(), seen.end());
        const auto m = mean_of(seen);
        line.push_back(m ? fixed2(*m) : "-");
      }
      const auto m = mean_of(all);
      line.push_back(m ? fixed2(*m) : "-");
      out.push_back(line);
    }
  }
  return out;
}

std::string as_text(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> width;
  for (const auto& line : cells) {
    if (width.size() < line.size()) width.resize(line.size(), 0);
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::ostringstream os;
  for (const auto& line : cells) {
    std::string text;
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c > 0) text += "  ";
      text += c < 2 ? pad_right(line[c], width[c]) : pad(line[c], width[c]);
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    os << text << '\n';
  }
  return os.str();
}

std::string as_csv(const std::vector<std::vector<std::string>>& cells) {
  std::ostringstream os;
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c > 0) os << ',';
      os << line[c];
    }
    os << '\n';
  }
  return os.str();
}

const std::vector<std::pair<std::string, Metric>>& error_metrics() {
  static const std::vector<std::pair<std::string, Metric>> m = {
      {"ME", [](const PairEvaluation& p) { return p.report.me; }},
      {"MSE", [](const PairEvaluation& p) { return p.report.mse; }},
      {"Acc", [](const PairEvaluation& p) { return p.report.acc; }},
  };
  return m;
}

const std::vector<std::pair<std::string, Metric>>& time_metrics() {
  static const std::vector<std::pair<std::string, Metric>> m = {
      {"Mea.", [](const PairEvaluation& p) { return p.measured_s; }},
      {"Est.", [](const PairEvaluation& p) { return p.estimated_s; }},
  };
  return m;
}

std::vector<std::vector<std::string>> ratio_cells(const RatioTable& t) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> header = {"App.", "T_A (s)"};
  for (const auto& c : t.co_runners) {
    header.push_back("T_A|" + c + " (s)");
    header.push_back("ratio " + c);
  }
  out.push_back(header);
  for (const auto& r : t.rows) {
    std::vector<std::string> line = {r.app, fixed2(r.solo_s)};
    for (std::size_t j = 0; j < r.ratio.size(); ++j) {
      line.push_back(fixed2(r.co_run_s[j]));
      line.push_back(fixed2(r.ratio[j]));
    }
    out.push_back(line);
  }
  return out;
}

}  // namespace

EvaluationReport evaluate(std::span<const double> delta, std::span<const double> delta_hat,
                          double sampling_period_s) {
  if (delta.size() != delta_hat.size()) {
    throw DataError("evaluate: " + std::to_string(delta.size()) + " measured vs " +
                    std::to_string(delta_hat.size()) + " estimated intervals");
  }
  if (delta.empty()) throw DataError("evaluate: no intervals");
  double sum_err = 0.0;
  double sum_sq = 0.0;
  double sum_rel = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (!(delta[i] > 0.0)) throw DataError("evaluate: measured deltas must be positive");
    const double e = delta[i] - delta_hat[i];
    sum_err += e;
    sum_sq += e * e;
    sum_rel += std::fabs(e) / delta[i];
  }
  const double n = static_cast<double>(delta.size());
  EvaluationReport r;
  r.n = delta.size();
  r.sampling_period_s = sampling_period_s;
  r.me = sum_err / n;
  r.mse = sum_sq / n;
  r.acc = 1.0 - sum_rel / n;
  r.epsilon = sum_err * sampling_period_s;
  return r;
}

RatioTable ratio_table(std::span<const std::string> apps, std::span<const double> solo_times,
                       const std::vector<std::vector<double>>& co_run_times,
                       std::vector<std::string> co_runners) {
  if (apps.size() != solo_times.size() || apps.size() != co_run_times.size()) {
    throw DataError("ratio_table: one solo time and one co-run row per application");
  }
  RatioTable t;
  t.co_runners = std::move(co_runners);
  for (std::size_t a = 0; a < apps.size(); ++a) {
    if (!(solo_times[a] > 0.0)) throw DataError("ratio_table: solo times must be positive");
    if (co_run_times[a].size() != t.co_runners.size()) {
      throw DataError("ratio_table: row '" + apps[a] + "' has the wrong number of co-runs");
    }
    RatioRow row;
    row.app = apps[a];
    row.solo_s = solo_times[a];
    row.co_run_s = co_run_times[a];
    for (const double c : row.co_run_s) {
      if (!(c > 0.0)) throw DataError("ratio_table: co-run times must be positive");
      row.ratio.push_back(c / row.solo_s);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string render_ratio_table_text(const RatioTable& table) { return as_text(ratio_cells(table)); }
std::string render_ratio_table_csv(const RatioTable& table) { return as_csv(ratio_cells(table)); }

std::string render_metrics_grid_text(std::span<const PairEvaluation> pairs) {
  return as_text(metric_cells(make_grid(pairs), error_metrics(), true));
}

std::string render_metrics_grid_csv(std::span<const PairEvaluation> pairs) {
  return as_csv(metric_cells(make_grid(pairs), error_metrics(), true));
}

std::string render_times_grid_text(std::span<const PairEvaluation> pairs) {
  return as_text(metric_cells(make_grid(pairs), time_metrics(), false));
}

std::string render_times_grid_csv(std::span<const PairEvaluation> pairs) {
  return as_csv(metric_cells(make_grid(pairs), time_metrics(), false));
}

std::string render_plot_csv(std::span<const double> delta, std::span<const double> delta_hat,
                            double sampling_period_s) {
  if (delta.size() != delta_hat.size()) throw DataError("plot data: length mismatch");
  std::ostringstream os;
  os.precision(17);
  os << "t,delta,delta_hat\n";
  for (std::size_t i = 0; i < delta.size(); ++i) {
    os << static_cast<double>(i + 1) * sampling_period_s << ',' << delta[i] << ',' << delta_hat[i]
       << '\n';
  }
  return os.str();
}

}  // namespace ifx
