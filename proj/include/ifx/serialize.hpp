#pragma once

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "ifx/bench.hpp"
#include "ifx/cfa.hpp"
#include "ifx/evaluation.hpp"
#include "ifx/indices.hpp"
#include "ifx/predictor.hpp"
#include "ifx/profile.hpp"
#include "ifx/regression.hpp"
#include "ifx/synth.hpp"

// JSON encodings of every file the CLI reads or writes. Doubles are written
// in shortest round-trip form, so decode(encode(x)) reproduces x exactly.
// Decoders throw DataError on missing keys or wrong shapes.
namespace ifx::io {

using Json = nlohmann::ordered_json;

Json to_json(const MeasurementModel& model, const ScoreMatrix& scores);
std::pair<MeasurementModel, ScoreMatrix> measurement_model_from_json(const Json& j);

Json to_json(const EmpiricalCdf& cdf);
EmpiricalCdf cdf_from_json(const Json& j);

/// Model keys plus "faults" statistics and a "cdf" object with i2, i3, i4.
Json to_json(const IndexCalibration& c);
IndexCalibration calibration_from_json(const Json& j);

Json to_json(const InterferenceProfile& p);
InterferenceProfile profile_from_json(const Json& j);

Json to_json(const BenchmarkObservations& obs);
BenchmarkObservations observations_from_json(const Json& j);

Json to_json(const InterferenceModel& m);
InterferenceModel interference_model_from_json(const Json& j);

struct PredictionRecord {
  std::string app;
  std::string co_runner;
  Prediction prediction;
  std::vector<SensitivityRow> sensitivity;
  int scenario = 0;  // 0 when no sensitivity study was run
};

Json to_json(const PredictionRecord& r);
PredictionRecord prediction_from_json(const Json& j);

Json to_json(const PairEvaluation& e);
PairEvaluation pair_evaluation_from_json(const Json& j);

/// Synthetic scenario: apps, the three benchmark roles, ground truth, seed.
struct Scenario {
  std::uint64_t seed = 0;
  std::vector<synth::AppSpec> apps;
  std::vector<synth::AppSpec> benchmarks;
  synth::GroundTruth truth;
};

Json to_json(const synth::AppSpec& a);
synth::AppSpec app_spec_from_json(const Json& j);
Json to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);

/// Parses text, wrapping parser failures in DataError.
Json parse(const std::string& text, const std::string& what);

/// Canonical text form: two-space indent, trailing newline.
std::string dump(const Json& j);

}  // namespace ifx::io
