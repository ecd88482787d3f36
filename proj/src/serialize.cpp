#include "ifx/serialize.hpp"

#include "ifx/errors.hpp"

namespace ifx::io {
namespace {

const Json& at(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw DataError(std::string("missing JSON key '") + key + "'");
  }
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return at(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("JSON key '") + key + "': " + e.what());
  }
}

double number(const Json& j, const char* key) {
  const auto& v = at(j, key);
  if (!v.is_number()) throw DataError(std::string("JSON key '") + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> numbers(const Json& j, const char* key) {
  const auto& v = at(j, key);
  if (!v.is_array()) throw DataError(std::string("JSON key '") + key + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw DataError(std::string("JSON key '") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const Json& j, const char* key, Eigen::Index rows, Eigen::Index cols) {
  const auto& v = at(j, key);
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows) {
    throw DataError(std::string("JSON key '") + key + "' must have " + std::to_string(rows) + " rows");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw DataError(std::string("JSON key '") + key + "' must have " + std::to_string(cols) +
                      " columns");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) {
        throw DataError(std::string("JSON key '") + key + "' must hold numbers");
      }
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

Eigen::VectorXd vector_from(const Json& j, const char* key, Eigen::Index size) {
  const auto v = numbers(j, key);
  if (static_cast<Eigen::Index>(v.size()) != size) {
    throw DataError(std::string("JSON key '") + key + "' must have " + std::to_string(size) +
                    " entries");
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), size);
}

Json shape_json(const synth::Shape& shape) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, synth::Constant>) {
          return {{"kind", "constant"}, {"value", s.value}};
        } else if constexpr (std::is_same_v<T, synth::Step>) {
          return {{"kind", "step"}, {"before", s.before}, {"after", s.after}, {"fraction", s.fraction}};
        } else {
          return {{"kind", "sinusoid"}, {"mean", s.mean}, {"amplitude", s.amplitude},
                  {"period", s.period_s}, {"phase", s.phase}};
        }
      },
      shape);
}

synth::Shape shape_from(const Json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "constant") return synth::Constant{number(j, "value")};
  if (kind == "step") {
    return synth::Step{number(j, "before"), number(j, "after"), number(j, "fraction")};
  }
  if (kind == "sinusoid") {
    return synth::Sinusoid{number(j, "mean"), number(j, "amplitude"), number(j, "period"),
                           j.contains("phase") ? number(j, "phase") : 0.0};
  }
  throw DataError("unknown shape kind '" + kind + "'");
}

}  // namespace

Json to_json(const MeasurementModel& model, const ScoreMatrix& scores) {
  Json j;
  j["p"] = model.p;
  j["m"] = model.m;
  j["lambda"] = matrix_json(model.loadings);
  j["phi"] = matrix_json(model.factor_cov);
  j["psi"] = std::vector<double>(model.unique_var.data(), model.unique_var.data() + model.unique_var.size());
  j["mu"] = std::vector<double>(model.means.data(), model.means.data() + model.means.size());
  j["b"] = matrix_json(scores.b);
  return j;
}

std::pair<MeasurementModel, ScoreMatrix> measurement_model_from_json(const Json& j) {
  MeasurementModel model;
  model.p = get<int>(j, "p");
  model.m = get<int>(j, "m");
  if (model.p < 1 || model.m < 1 || model.m > model.p) throw DataError("invalid model dimensions");
  model.loadings = matrix_from(j, "lambda", model.p, model.m);
  model.factor_cov = matrix_from(j, "phi", model.m, model.m);
  model.unique_var = vector_from(j, "psi", model.p);
  model.means = vector_from(j, "mu", model.p);
  model.structure = structure_from_loadings(model.loadings);
  ScoreMatrix scores{matrix_from(j, "b", model.m, model.p)};
  return {std::move(model), std::move(scores)};
}

Json to_json(const EmpiricalCdf& cdf) {
  return {{"support", cdf.support()}, {"positions", cdf.positions()}};
}

EmpiricalCdf cdf_from_json(const Json& j) {
  return EmpiricalCdf(numbers(j, "support"), numbers(j, "positions"));
}

Json to_json(const IndexCalibration& c) {
  Json j = to_json(c.model, c.scores);
  j["faults"] = {{"mean", c.stats.faults_mean}, {"std", c.stats.faults_std},
                 {"n", c.stats.sample_count}};
  j["cdf"] = {{"i2", to_json(c.cdfs.i2)}, {"i3", to_json(c.cdfs.i3)}, {"i4", to_json(c.cdfs.i4)}};
  return j;
}

IndexCalibration calibration_from_json(const Json& j) {
  IndexCalibration c;
  std::tie(c.model, c.scores) = measurement_model_from_json(j);
  const auto& f = at(j, "faults");
  c.stats.faults_mean = number(f, "mean");
  c.stats.faults_std = number(f, "std");
  c.stats.sample_count = get<std::size_t>(f, "n");
  const auto& cdf = at(j, "cdf");
  c.cdfs.i2 = cdf_from_json(at(cdf, "i2"));
  c.cdfs.i3 = cdf_from_json(at(cdf, "i3"));
  c.cdfs.i4 = cdf_from_json(at(cdf, "i4"));
  return c;
}

Json to_json(const InterferenceProfile& p) {
  Json y = Json::array();
  for (const auto& row : p.y) y.push_back({row[0], row[1], row[2], row[3]});
  Json j;
  j["app"] = p.app_name;
  j["sA"] = p.sampling_period_s;
  j["T"] = p.total_time_s;
  j["y"] = std::move(y);
  j["instr"] = p.instructions;
  return j;
}

InterferenceProfile profile_from_json(const Json& j) {
  InterferenceProfile p;
  p.app_name = get<std::string>(j, "app");
  p.sampling_period_s = number(j, "sA");
  p.total_time_s = number(j, "T");
  const auto& y = at(j, "y");
  if (!y.is_array()) throw DataError("profile 'y' must be an array");
  for (const auto& row : y) {
    if (!row.is_array() || row.size() != 4) throw DataError("profile rows must have 4 indices");
    std::array<double, 4> r{};
    for (std::size_t k = 0; k < 4; ++k) {
      if (!row[k].is_number()) throw DataError("profile values must be numbers");
      r[k] = row[k].get<double>();
    }
    p.y.push_back(r);
  }
  if (j.contains("instr")) p.instructions = get<std::vector<std::uint64_t>>(j, "instr");
  validate_profile(p);
  return p;
}

Json to_json(const BenchmarkObservations& obs) {
  Json cols = Json::array();
  for (const auto& c : obs.columns) {
    cols.push_back({{"name", c.co_runner}, {"T", c.co_run_time_s}, {"tau", c.tau}, {"delta", c.delta}});
  }
  Json j;
  j["app"] = obs.app_name;
  j["sA"] = obs.sampling_period_s;
  j["T"] = obs.solo_time_s;
  j["benchmarks"] = std::move(cols);
  return j;
}

BenchmarkObservations observations_from_json(const Json& j) {
  BenchmarkObservations obs;
  obs.app_name = get<std::string>(j, "app");
  obs.sampling_period_s = number(j, "sA");
  obs.solo_time_s = number(j, "T");
  const auto& cols = at(j, "benchmarks");
  if (!cols.is_array()) throw DataError("'benchmarks' must be an array");
  for (const auto& c : cols) {
    ObservationColumn col;
    col.co_runner = get<std::string>(c, "name");
    col.co_run_time_s = number(c, "T");
    col.tau = numbers(c, "tau");
    col.delta = numbers(c, "delta");
    obs.columns.push_back(std::move(col));
  }
  validate_observations(obs);
  return obs;
}

Json to_json(const InterferenceModel& m) {
  Json j;
  j["scope"] = m.scope;
  j["beta"] = m.beta;
  j["rss"] = m.rss;
  j["n_obs"] = m.n_obs;
  return j;
}

InterferenceModel interference_model_from_json(const Json& j) {
  InterferenceModel m;
  m.scope = get<std::string>(j, "scope");
  const auto beta = numbers(j, "beta");
  if (beta.size() != kModelTerms) throw DataError("'beta' must have 9 coefficients");
  for (std::size_t k = 0; k < beta.size(); ++k) {
    if (!(beta[k] >= 0.0)) throw DataError("'beta' coefficients must be non-negative");
    m.beta[k] = beta[k];
  }
  m.rss = number(j, "rss");
  m.n_obs = get<std::size_t>(j, "n_obs");
  return m;
}

Json to_json(const PredictionRecord& r) {
  Json j;
  j["app"] = r.app;
  j["with"] = r.co_runner;
  j["sA"] = r.prediction.sampling_period_s;
  j["delay_k"] = r.prediction.delay_k;
  j["delta_hat"] = r.prediction.delta_hat;
  j["total_time"] = r.prediction.total_time_s;
  if (r.scenario != 0) {
    Json rows = Json::array();
    for (const auto& s : r.sensitivity) {
      rows.push_back({{"n", s.n}, {"sA", s.period_s}, {"estimate", s.estimate_s}});
    }
    j["scenario"] = r.scenario;
    j["sensitivity"] = std::move(rows);
  }
  return j;
}

PredictionRecord prediction_from_json(const Json& j) {
  PredictionRecord r;
  r.app = get<std::string>(j, "app");
  r.co_runner = get<std::string>(j, "with");
  r.prediction.sampling_period_s = number(j, "sA");
  r.prediction.delay_k = get<int>(j, "delay_k");
  r.prediction.delta_hat = numbers(j, "delta_hat");
  r.prediction.total_time_s = number(j, "total_time");
  if (j.contains("sensitivity")) {
    r.scenario = get<int>(j, "scenario");
    for (const auto& s : at(j, "sensitivity")) {
      r.sensitivity.push_back({get<std::size_t>(s, "n"), number(s, "sA"), number(s, "estimate")});
    }
  }
  return r;
}

Json to_json(const PairEvaluation& e) {
  Json j;
  j["app"] = e.app;
  j["with"] = e.co_runner;
  j["n"] = e.report.n;
  j["sA"] = e.report.sampling_period_s;
  j["me"] = e.report.me;
  j["mse"] = e.report.mse;
  j["acc"] = e.report.acc;
  j["epsilon"] = e.report.epsilon;
  j["measured_time"] = e.measured_s;
  j["estimated_time"] = e.estimated_s;
  return j;
}

PairEvaluation pair_evaluation_from_json(const Json& j) {
  PairEvaluation e;
  e.app = get<std::string>(j, "app");
  e.co_runner = get<std::string>(j, "with");
  e.report.n = get<std::size_t>(j, "n");
  e.report.sampling_period_s = number(j, "sA");
  e.report.me = number(j, "me");
  e.report.mse = number(j, "mse");
  e.report.acc = number(j, "acc");
  e.report.epsilon = number(j, "epsilon");
  e.measured_s = number(j, "measured_time");
  e.estimated_s = number(j, "estimated_time");
  return e;
}

Json to_json(const synth::AppSpec& a) {
  Json shapes = Json::array();
  for (const auto& s : a.shapes) shapes.push_back(shape_json(s));
  Json j;
  j["name"] = a.name;
  j["duration"] = a.duration_s;
  j["sA"] = a.sampling_period_s;
  j["seed"] = a.seed;
  j["jitter"] = a.jitter;
  j["instructions_per_second"] = a.instructions_per_second;
  j["shapes"] = std::move(shapes);
  return j;
}

synth::AppSpec app_spec_from_json(const Json& j) {
  synth::AppSpec a;
  a.name = get<std::string>(j, "name");
  a.duration_s = number(j, "duration");
  a.sampling_period_s = number(j, "sA");
  if (j.contains("seed")) a.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("jitter")) a.jitter = number(j, "jitter");
  if (j.contains("instructions_per_second")) a.instructions_per_second = number(j, "instructions_per_second");
  const auto& shapes = at(j, "shapes");
  if (!shapes.is_array() || shapes.size() != 4) throw DataError("'shapes' must list 4 index shapes");
  for (std::size_t k = 0; k < 4; ++k) a.shapes[k] = shape_from(shapes[k]);
  return a;
}

Json to_json(const Scenario& s) {
  Json apps = Json::array();
  for (const auto& a : s.apps) apps.push_back(to_json(a));
  Json benches = Json::array();
  for (const auto& b : s.benchmarks) benches.push_back(to_json(b));
  Json j;
  j["seed"] = s.seed;
  j["apps"] = std::move(apps);
  j["benchmarks"] = std::move(benches);
  j["truth"] = {{"beta", s.truth.beta}, {"noise_sigma", s.truth.noise_sigma}};
  return j;
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  if (j.contains("seed")) s.seed = get<std::uint64_t>(j, "seed");
  for (const auto& a : at(j, "apps")) s.apps.push_back(app_spec_from_json(a));
  for (const auto& b : at(j, "benchmarks")) s.benchmarks.push_back(app_spec_from_json(b));
  if (s.apps.empty() || s.benchmarks.empty()) {
    throw DataError("scenario needs at least one app and one benchmark");
  }
  const auto& truth = at(j, "truth");
  const auto beta = numbers(truth, "beta");
  if (beta.size() != kModelTerms) throw DataError("truth 'beta' must have 9 coefficients");
  for (std::size_t k = 0; k < beta.size(); ++k) s.truth.beta[k] = beta[k];
  s.truth.noise_sigma = truth.contains("noise_sigma") ? number(truth, "noise_sigma") : 0.0;
  return s;
}

Json parse(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(what + ": invalid JSON: " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace ifx::io
