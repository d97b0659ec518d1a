// Copyright 2026 The ComVE Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COMVE_RUNNER_H_
#define COMVE_RUNNER_H_

// Experiment runner behind the command-line tool. A run resolves a RunConfig,
// executes one pipeline and persists its artifacts under a fresh directory:
//
//   config.snapshot   resolved configuration (JSON, re-runnable as --config)
//   predictions.csv   one row per example, no header
//   metrics.json      metric reports, counts, timing and toolkit version
//   log.txt           human-readable progress and per-example failures

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "comve/corpus.h"
#include "comve/generation.h"
#include "comve/plausibility.h"
#include "comve/training.h"
#include "json.hpp"

namespace comve {

inline constexpr const char* kToolkitVersion = "0.3.0";
inline constexpr const char* kOutputRootEnv = "COMVE_OUT";

enum class Method { kMlm, kClassify, kMc, kIdentity, kLm };

Method ParseMethod(std::string_view s);
std::string_view MethodName(Method m);
bool MethodValidFor(Subtask subtask, Method method);

struct BackendSpec {
  enum class Kind { kNone, kCount, kService };
  Kind kind = Kind::kNone;
  std::string location;  // corpus path or service URL
};

// "count:PATH" or "service:URL".
BackendSpec ParseBackendSpec(std::string_view s);
std::string FormatBackendSpec(const BackendSpec& spec);

struct RunConfig {
  Subtask subtask = Subtask::kA;
  Method method = Method::kMlm;
  Normalization normalization = Normalization::kRaw;
  bool content_only = false;
  bool insert_separator = false;
  BackendSpec backend;
  double alpha = 1.0;  // smoothing of the count backends
  std::string data_path;
  std::optional<std::string> answers_path;
  std::optional<std::string> eval_data_path;  // train / sweep only
  std::optional<std::string> eval_answers_path;
  std::string out_root = "runs";
  std::uint64_t seed = 0;
  DecodeConfig decode;
  TrainingConfig training;
};

// Throws InvalidArgument for a method the subtask does not support, missing
// files, or a missing backend where the method needs one.
void Validate(const RunConfig& cfg, bool training = false);

nlohmann::json ToJson(const RunConfig& cfg);
// Keys absent from `j` keep the values in `base`.
RunConfig RunConfigFromJson(const nlohmann::json& j, RunConfig base = {});
RunConfig LoadRunConfig(const std::string& path, RunConfig base = {});

struct RunRecord {
  std::string run_dir;
  nlohmann::json config_snapshot;
  std::vector<std::vector<std::string>> predictions;
  nlohmann::json metrics;  // includes "timing_ms" and "version"
  std::size_t failures = 0;
  int exit_code = 0;
};

// Runs validate-a / explain-b / generate-c according to cfg.subtask.
RunRecord Run(const RunConfig& cfg);

// Fine-tunes the reference trainable model on (data, answers); evaluates on
// the eval set when given.
RunRecord RunTrain(const RunConfig& cfg);

// Sweeps the given peak learning rates (default grid when empty).
RunRecord RunSweep(const RunConfig& cfg, std::vector<double> learning_rates);

// Scores a predictions file (id,label or id,candidate) against a gold
// answers file. Returns {"subtask":..,"accuracy":{..}} or {..,"bleu":{..}}.
nlohmann::json Evaluate(const std::string& predictions_path, const std::string& gold_path,
                        Subtask subtask);

struct ComparisonRow {
  std::string run_dir;
  std::string method;
  std::string metric_name;
  double metric = 0.0;
};

// Rows sorted by metric, descending; equal metrics keep input order.
std::vector<ComparisonRow> Compare(const std::vector<std::string>& run_dirs);
std::string RenderComparison(const std::vector<ComparisonRow>& rows);
nlohmann::json ToJson(const std::vector<ComparisonRow>& rows);

nlohmann::json DatasetStats(Subtask subtask, const std::string& data_path,
                            const std::optional<std::string>& answers_path);

}  // namespace comve

#endif  // COMVE_RUNNER_H_
