#include "ifx/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "ifx/errors.hpp"
#include "ifx/format.hpp"
#include "ifx/serialize.hpp"

namespace ifx {
namespace {

namespace fs = std::filesystem;
using io::Json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json read_json(const std::string& path) { return io::parse(read_file(path), path); }

// Temp file + rename so readers never observe a partial file.
void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
    if (!out.flush()) throw DataError("failed writing '" + path.string() + "'");
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const Json& j) { write_file(path, io::dump(j)); }

RawTrace load_trace(const std::string& path) {
  try {
    return parse_trace_csv(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

// Runs fn(0..n-1) on at most `jobs` threads. Rethrows the exception of the
// lowest failing index so failures are reported deterministically.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::clamp<long>(jobs, 1, static_cast<long>(std::max<std::size_t>(n, 1))));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<double> parse_periods(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !(v > 0.0)) throw std::invalid_argument("bad");
      out.push_back(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--periods", "'" + item + "' is not a positive number");
    }
  }
  if (out.empty()) throw CLI::ValidationError("--periods", "no periods given");
  return out;
}

// ---------------------------------------------------------------- profile

struct ProfileArgs {
  std::vector<std::string> traces;
  std::vector<std::string> outs;
  std::vector<std::string> reference;
  std::string model = "preset";
  std::string calibration_out;
  double resample_s = 0.0;
};

IndexCalibration resolve_calibration(const ProfileArgs& a, std::span<const RawTrace> inputs) {
  std::vector<RawTrace> reference;
  for (const auto& r : a.reference) reference.push_back(load_trace(r));
  const std::span<const RawTrace> ref =
      reference.empty() ? inputs : std::span<const RawTrace>(reference);
  if (a.model == "preset") {
    auto [model, scores] = preset_index_model();
    return calibrate(ref, std::move(model), std::move(scores));
  }
  if (a.model == "fit") return fit_calibration(ref);
  const Json j = read_json(a.model);
  if (j.contains("cdf")) return io::calibration_from_json(j);
  auto [model, scores] = io::measurement_model_from_json(j);
  return calibrate(ref, std::move(model), std::move(scores));
}

void run_profile(const ProfileArgs& a, std::ostream& err) {
  if (a.traces.size() != a.outs.size()) {
    throw CLI::ValidationError("--out", "give one --out per --trace");
  }
  std::vector<RawTrace> traces;
  for (const auto& t : a.traces) traces.push_back(load_trace(t));
  for (std::size_t k = 0; k < traces.size(); ++k) {
    for (const auto& d : validate_trace(traces[k])) {
      if (d.severity == Severity::kWarning) err << a.traces[k] << ": warning: " << d.message << '\n';
    }
  }
  const auto calibration = resolve_calibration(a, traces);
  if (!a.calibration_out.empty()) write_json(a.calibration_out, io::to_json(calibration));
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto indices = index_trace(traces[k], calibration);
    if (!indices.flagged_windows.empty()) {
      err << a.traces[k] << ": warning: " << indices.flagged_windows.size()
          << " window(s) hit a zero denominator or log floor\n";
    }
    auto profile = make_profile(indices, traces[k]);
    if (a.resample_s > 0.0) profile = resample(profile, a.resample_s);
    write_json(a.outs[k], io::to_json(profile));
  }
}

// ------------------------------------------------------------------ bench

struct BenchArgs {
  std::string solo;
  std::vector<std::string> coruns;  // name=path
  std::string out;
};

void run_bench(const BenchArgs& a, int jobs) {
  const auto solo = load_trace(a.solo);
  std::vector<std::string> names;
  std::vector<std::string> paths;
  for (const auto& c : a.coruns) {
    const auto eq = c.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == c.size()) {
      throw CLI::ValidationError("--corun", "expected name=path, got '" + c + "'");
    }
    names.push_back(c.substr(0, eq));
    paths.push_back(c.substr(eq + 1));
  }
  BenchmarkObservations obs;
  obs.app_name = solo.app_name;
  obs.sampling_period_s = solo.sampling_period_s;
  obs.solo_time_s = solo.total_time_s;
  obs.columns.resize(names.size());
  parallel_for(names.size(), jobs, [&](std::size_t j) {
    obs.columns[j] = observe_co_run(solo, load_trace(paths[j]), names[j]);
  });
  Json j = io::to_json(obs);
  std::vector<double> times;
  for (const auto& c : obs.columns) times.push_back(c.co_run_time_s);
  j["wait_time"] = bench_wait_time(times);
  write_json(a.out, j);
}

// -------------------------------------------------------------------- fit

struct FitArgs {
  std::vector<std::string> scenarios;
  std::string app;
  std::vector<std::string> benches;
  std::string obs;
  bool single = false;
  std::string out;
  std::string out_dir;
};

TrainingSet load_training_set(const std::string& app, const std::vector<std::string>& benches,
                              const std::string& obs) {
  TrainingSet set;
  set.app = io::profile_from_json(read_json(app));
  for (const auto& b : benches) set.co_runners.push_back(io::profile_from_json(read_json(b)));
  set.observations = io::observations_from_json(read_json(obs));
  return set;
}

TrainingSet load_scenario_dir(const std::string& dir) {
  const fs::path base(dir);
  const Json m = read_json((base / "manifest.json").string());
  const auto rel = [&](const Json& v) {
    if (!v.is_string()) throw DataError(dir + ": manifest entries must be paths");
    return (base / v.get<std::string>()).string();
  };
  if (!m.contains("app") || !m.contains("benchmarks") || !m.contains("observations")) {
    throw DataError(dir + ": manifest needs app, benchmarks and observations");
  }
  std::vector<std::string> benches;
  for (const auto& b : m.at("benchmarks")) benches.push_back(rel(b));
  return load_training_set(rel(m.at("app")), benches, rel(m.at("observations")));
}

void run_fit(const FitArgs& a, int jobs, std::ostream& err) {
  std::vector<TrainingSet> sets;
  for (const auto& s : a.scenarios) sets.push_back(load_scenario_dir(s));
  if (!a.app.empty()) {
    if (a.benches.empty() || a.obs.empty()) {
      throw CLI::ValidationError("--app", "--app needs --bench and --obs");
    }
    sets.push_back(load_training_set(a.app, a.benches, a.obs));
  }
  if (sets.empty()) throw CLI::ValidationError("fit", "give --scenario or --app/--bench/--obs");
  for (const auto& s : sets) {
    const auto rank = design_rank(assemble_design(s.app, s.co_runners, s.observations));
    if (rank < kModelTerms) {
      err << "warning: design for '" << s.app.app_name << "' has rank " << rank
          << " < 9; coefficients are not identifiable\n";
    }
  }
  if (a.single) {
    if (a.out.empty()) throw CLI::ValidationError("--out", "--single needs --out");
    write_json(a.out, io::to_json(fit_single_model(sets)));
    return;
  }
  if (sets.size() == 1 && !a.out.empty()) {
    const auto& s = sets.front();
    write_json(a.out, io::to_json(fit_model(s.app, s.co_runners, s.observations)));
    return;
  }
  if (a.out_dir.empty()) {
    throw CLI::ValidationError("--out-dir", "several per-application fits need --out-dir");
  }
  std::vector<InterferenceModel> models(sets.size());
  parallel_for(sets.size(), jobs, [&](std::size_t k) {
    models[k] = fit_model(sets[k].app, sets[k].co_runners, sets[k].observations);
  });
  for (const auto& m : models) {
    write_json(fs::path(a.out_dir) / (m.scope + ".model.json"), io::to_json(m));
  }
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
  std::string model;
  std::string app;
  std::string with;
  int delay = 0;
  std::string periods;
  int scenario = 1;
  std::string out;
  std::string csv;
};

void run_predict(const PredictArgs& a, std::ostream& out) {
  const auto periods = a.periods.empty() ? std::vector<double>{} : parse_periods(a.periods);
  const auto model = io::interference_model_from_json(read_json(a.model));
  const auto app = io::profile_from_json(read_json(a.app));
  const auto with = io::profile_from_json(read_json(a.with));
  io::PredictionRecord rec;
  rec.app = app.app_name;
  rec.co_runner = with.app_name;
  rec.prediction = estimate_execution_time(model, app, with, a.delay);
  if (!periods.empty()) {
    rec.scenario = a.scenario;
    rec.sensitivity = sampling_sensitivity(model, app, with, periods,
                                           static_cast<SamplingScenario>(a.scenario));
    std::ostringstream table;
    table << "n,sA,estimate\n";
    for (const auto& r : rec.sensitivity) {
      table << r.n << ',' << format_double(r.period_s) << ',' << format_double(r.estimate_s) << '\n';
    }
    out << table.str();
  }
  write_json(a.out, io::to_json(rec));
  if (!a.csv.empty()) {
    std::ostringstream os;
    os << "t,delta_hat\n";
    const auto& p = rec.prediction;
    for (std::size_t i = 0; i < p.delta_hat.size(); ++i) {
      os << format_double(static_cast<double>(i + 1) * p.sampling_period_s) << ','
         << format_double(p.delta_hat[i]) << '\n';
    }
    write_file(a.csv, os.str());
  }
}

// ------------------------------------------------------------------- eval

struct EvalArgs {
  std::string prediction;
  std::string obs;
  std::string column;
  std::string out;
  std::string plot_csv;
};

void run_eval(const EvalArgs& a, std::ostream& out) {
  const auto rec = io::prediction_from_json(read_json(a.prediction));
  const auto obs = io::observations_from_json(read_json(a.obs));
  const std::string name = a.column.empty() ? rec.co_runner : a.column;
  const auto it = std::find_if(obs.columns.begin(), obs.columns.end(),
                               [&](const ObservationColumn& c) { return c.co_runner == name; });
  if (it == obs.columns.end()) throw DataError("observations have no column '" + name + "'");
  PairEvaluation e;
  e.app = rec.app;
  e.co_runner = name;
  e.report = evaluate(it->delta, rec.prediction.delta_hat, obs.sampling_period_s);
  e.measured_s = it->co_run_time_s;
  e.estimated_s = rec.prediction.total_time_s;
  write_json(a.out, io::to_json(e));
  if (!a.plot_csv.empty()) {
    write_file(a.plot_csv, render_plot_csv(it->delta, rec.prediction.delta_hat, obs.sampling_period_s));
  }
  out << e.app << " with " << e.co_runner << ": ME " << format_double(e.report.me) << ", MSE "
      << format_double(e.report.mse) << ", Acc " << format_double(e.report.acc) << ", epsilon "
      << format_double(e.report.epsilon) << " s (n * sA * ME)\n";
  if (e.report.acc < 0.0) out << "note: accuracy is negative (mean relative error above 1)\n";
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
  std::string scenario;
  std::string out_dir;
  long long seed = -1;
};

void run_synth(const SynthArgs& a, std::ostream& err) {
  auto sc = io::scenario_from_json(read_json(a.scenario));
  if (a.seed >= 0) sc.seed = static_cast<std::uint64_t>(a.seed);
  const fs::path base(a.out_dir);
  std::vector<InterferenceProfile> apps;
  std::vector<InterferenceProfile> benches;
  for (const auto& s : sc.apps) apps.push_back(synth::gen_profile(s));
  for (const auto& s : sc.benchmarks) benches.push_back(synth::gen_profile(s));
  for (const auto& p : apps) write_json(base / "profiles" / (p.app_name + ".profile.json"), io::to_json(p));
  for (const auto& p : benches) write_json(base / "profiles" / (p.app_name + ".profile.json"), io::to_json(p));

  const auto column_seed = [&](std::size_t app, std::size_t other) {
    return sc.seed * 1000003ULL + app * 1009ULL + other;
  };
  for (std::size_t i = 0; i < apps.size(); ++i) {
    BenchmarkObservations obs;
    obs.app_name = apps[i].app_name;
    obs.sampling_period_s = apps[i].sampling_period_s;
    obs.solo_time_s = apps[i].total_time_s;
    Json bench_paths = Json::array();
    for (std::size_t j = 0; j < benches.size(); ++j) {
      obs.columns.push_back(synth::simulate_cosched(apps[i], benches[j], sc.truth, column_seed(i, j)));
      bench_paths.push_back("../profiles/" + benches[j].app_name + ".profile.json");
    }
    const auto rank = design_rank(assemble_design(apps[i], benches, obs));
    if (rank < kModelTerms) {
      err << "warning: synthetic design for '" << obs.app_name << "' has rank " << rank
          << " < 9; coefficients are not identifiable\n";
    }
    const fs::path dir = base / apps[i].app_name;
    write_json(dir / "observations.json", io::to_json(obs));
    Json manifest;
    manifest["app"] = "../profiles/" + apps[i].app_name + ".profile.json";
    manifest["benchmarks"] = bench_paths;
    manifest["observations"] = "observations.json";
    manifest["seed"] = sc.seed;
    write_json(dir / "manifest.json", manifest);
  }
  // Ground-truth co-runs between applications, for predict/eval.
  for (std::size_t i = 0; i < apps.size(); ++i) {
    for (std::size_t k = 0; k < apps.size(); ++k) {
      if (i == k) continue;
      BenchmarkObservations obs;
      obs.app_name = apps[i].app_name;
      obs.sampling_period_s = apps[i].sampling_period_s;
      obs.solo_time_s = apps[i].total_time_s;
      obs.columns.push_back(
          synth::simulate_cosched(apps[i], apps[k], sc.truth, column_seed(i, benches.size() + k)));
      write_json(base / "pairs" / (apps[i].app_name + "__" + apps[k].app_name + ".obs.json"),
                 io::to_json(obs));
    }
  }
  write_json(base / "scenario.json", io::to_json(sc));
}

// ----------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> obs;
  std::vector<std::string> evals;
  std::string out_dir;
};

void run_report(const ReportArgs& a, std::ostream& out) {
  if (a.obs.empty() && a.evals.empty()) {
    throw CLI::ValidationError("report", "give --obs and/or --eval files");
  }
  const fs::path base(a.out_dir);
  if (!a.obs.empty()) {
    std::vector<std::string> apps;
    std::vector<double> solo;
    std::vector<std::vector<double>> co;
    std::vector<std::string> names;
    for (const auto& path : a.obs) {
      const auto obs = io::observations_from_json(read_json(path));
      std::vector<std::string> these;
      std::vector<double> times;
      for (const auto& c : obs.columns) {
        these.push_back(c.co_runner);
        times.push_back(c.co_run_time_s);
      }
      if (names.empty()) names = these;
      if (these != names) throw DataError(path + ": co-runners differ from the first file");
      apps.push_back(obs.app_name);
      solo.push_back(obs.solo_time_s);
      co.push_back(times);
    }
    const auto table = ratio_table(apps, solo, co, names);
    const auto text = render_ratio_table_text(table);
    write_file(base / "ratios.txt", text);
    write_file(base / "ratios.csv", render_ratio_table_csv(table));
    out << text;
  }
  if (!a.evals.empty()) {
    std::vector<PairEvaluation> pairs;
    for (const auto& path : a.evals) pairs.push_back(io::pair_evaluation_from_json(read_json(path)));
    const auto metrics = render_metrics_grid_text(pairs);
    const auto times = render_times_grid_text(pairs);
    write_file(base / "metrics.txt", metrics);
    write_file(base / "metrics.csv", render_metrics_grid_csv(pairs));
    write_file(base / "times.txt", times);
    write_file(base / "times.csv", render_times_grid_csv(pairs));
    out << metrics << '\n' << times;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interference profiling and co-scheduling prediction", "ifx"};
  app.set_config("--config", "", "key=value configuration file (flags override it)");
  app.require_subcommand(1);
  app.fallthrough();
  int jobs = 1;
  app.add_option("--jobs,-j", jobs, "Maximum concurrent work items")->check(CLI::PositiveNumber);

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "Trace CSV -> interference profile JSON");
  profile->add_option("--trace", pa.traces, "Solo-run trace CSV")->required()->check(CLI::ExistingFile);
  profile->add_option("--out", pa.outs, "Profile JSON, one per --trace")->required();
  profile->add_option("--model", pa.model, "preset, fit, or a model/calibration JSON");
  profile->add_option("--reference", pa.reference, "Reference traces for calibration")
      ->check(CLI::ExistingFile);
  profile->add_option("--calibration-out", pa.calibration_out, "Write the calibration bundle");
  profile->add_option("--sA", pa.resample_s, "Resample the profile to this period")
      ->check(CLI::PositiveNumber);

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Align co-run traces -> observations JSON");
  bench->add_option("--solo", ba.solo, "Solo-run trace CSV")->required()->check(CLI::ExistingFile);
  bench->add_option("--corun", ba.coruns, "name=trace.csv of a co-scheduled run")->required();
  bench->add_option("--out", ba.out, "Observations JSON")->required();

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit the interference model");
  fit->add_option("--scenario", fa.scenarios, "Scenario directory with manifest.json")
      ->check(CLI::ExistingDirectory);
  fit->add_option("--app", fa.app, "Application profile JSON")->check(CLI::ExistingFile);
  fit->add_option("--bench", fa.benches, "Benchmark profile JSON, in observation order")
      ->check(CLI::ExistingFile);
  fit->add_option("--obs", fa.obs, "Observations JSON")->check(CLI::ExistingFile);
  fit->add_flag("--single", fa.single, "Pool every dataset into one model");
  fit->add_option("--out", fa.out, "Model JSON");
  fit->add_option("--out-dir", fa.out_dir, "Directory for per-application models");

  PredictArgs pr;
  auto* predict = app.add_subcommand("predict", "Estimate interference and execution time");
  predict->add_option("--model", pr.model, "Interference model JSON")->required()->check(CLI::ExistingFile);
  predict->add_option("--app", pr.app, "Profile of the application")->required()->check(CLI::ExistingFile);
  predict->add_option("--with", pr.with, "Profile of the co-runner")->required()->check(CLI::ExistingFile);
  predict->add_option("--delay", pr.delay, "Start after the co-runner reaches interval k")
      ->check(CLI::NonNegativeNumber);
  predict->add_option("--periods", pr.periods, "Comma-separated sampling periods to study");
  predict->add_option("--scenario-mode", pr.scenario, "1: coarse prediction, 2: coarse profiles")
      ->check(CLI::IsMember({1, 2}));
  predict->add_option("--out", pr.out, "Prediction JSON")->required();
  predict->add_option("--csv", pr.csv, "Per-interval CSV");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Compare a prediction with measurements");
  eval->add_option("--prediction", ea.prediction, "Prediction JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--obs", ea.obs, "Observations JSON holding the measured column")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--column", ea.column, "Observation column (default: the prediction's co-runner)");
  eval->add_option("--out", ea.out, "Evaluation JSON")->required();
  eval->add_option("--plot-csv", ea.plot_csv, "t,delta,delta_hat plot data");

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scenario bundle");
  synth_cmd->add_option("--scenario", sa.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  synth_cmd->add_option("--out-dir", sa.out_dir, "Output directory")->required();
  synth_cmd->add_option("--seed", sa.seed, "Override the scenario seed")->check(CLI::NonNegativeNumber);

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Slowdown and accuracy tables");
  report->add_option("--obs", ra.obs, "Observations JSON files")->check(CLI::ExistingFile);
  report->add_option("--eval", ra.evals, "Evaluation JSON files")->check(CLI::ExistingFile);
  report->add_option("--out-dir", ra.out_dir, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (profile->parsed()) run_profile(pa, err);
    else if (bench->parsed()) run_bench(ba, jobs);
    else if (fit->parsed()) run_fit(fa, jobs, err);
    else if (predict->parsed()) run_predict(pr, out);
    else if (eval->parsed()) run_eval(ea, out);
    else if (synth_cmd->parsed()) run_synth(sa, err);
    else if (report->parsed()) run_report(ra, out);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::Error& e) {
    err << "ifx: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "ifx: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "ifx: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace ifx
