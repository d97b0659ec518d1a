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

#include "comve/runner.h"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_map>

#include "comve/batch.h"
#include "comve/choice.h"
#include "comve/count_backends.h"
#include "comve/csv.h"
#include "comve/error.h"
#include "comve/metrics.h"
#include "comve/service_backend.h"

namespace comve {

namespace fs = std::filesystem;
using nlohmann::json;

Method ParseMethod(std::string_view s) {
  if (s == "mlm") return Method::kMlm;
  if (s == "classify") return Method::kClassify;
  if (s == "mc") return Method::kMc;
  if (s == "identity") return Method::kIdentity;
  if (s == "lm") return Method::kLm;
  throw InvalidArgument("unknown method '" + std::string(s) + "'");
}

std::string_view MethodName(Method m) {
  switch (m) {
    case Method::kMlm: return "mlm";
    case Method::kClassify: return "classify";
    case Method::kMc: return "mc";
    case Method::kIdentity: return "identity";
    case Method::kLm: return "lm";
  }
  return "?";
}

bool MethodValidFor(Subtask subtask, Method method) {
  switch (subtask) {
    case Subtask::kA:
      return method == Method::kMlm || method == Method::kClassify || method == Method::kMc;
    case Subtask::kB: return method == Method::kMc;
    case Subtask::kC: return method == Method::kIdentity || method == Method::kLm;
  }
  return false;
}

BackendSpec ParseBackendSpec(std::string_view s) {
  BackendSpec spec;
  if (s.empty()) return spec;
  const std::size_t colon = s.find(':');
  if (colon == std::string_view::npos || colon + 1 == s.size()) {
    throw InvalidArgument("backend must be count:CORPUS or service:URL, got '" + std::string(s) + "'");
  }
  const std::string_view kind = s.substr(0, colon);
  spec.location = std::string(s.substr(colon + 1));
  if (kind == "count") {
    spec.kind = BackendSpec::Kind::kCount;
  } else if (kind == "service") {
    spec.kind = BackendSpec::Kind::kService;
  } else {
    throw InvalidArgument("unknown backend kind '" + std::string(kind) + "'");
  }
  return spec;
}

std::string FormatBackendSpec(const BackendSpec& spec) {
  switch (spec.kind) {
    case BackendSpec::Kind::kNone: return "";
    case BackendSpec::Kind::kCount: return "count:" + spec.location;
    case BackendSpec::Kind::kService: return "service:" + spec.location;
  }
  return "";
}

namespace {

void RequireFile(const std::string& path, const std::string& what) {
  if (path.empty()) throw InvalidArgument(what + " path is required");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw InvalidArgument(what + " not found: " + path);
}

std::string_view StrategyName(DecodeStrategy s) {
  return s == DecodeStrategy::kGreedy ? "greedy" : "sample";
}

DecodeStrategy ParseStrategy(std::string_view s) {
  if (s == "greedy") return DecodeStrategy::kGreedy;
  if (s == "sample") return DecodeStrategy::kSample;
  throw InvalidArgument("unknown decode strategy '" + std::string(s) + "'");
}

}  // namespace

void Validate(const RunConfig& cfg, bool training) {
  if (!MethodValidFor(cfg.subtask, cfg.method)) {
    throw InvalidArgument("method '" + std::string(MethodName(cfg.method)) +
                          "' is not available for subtask " +
                          std::string(SubtaskName(cfg.subtask)));
  }
  RequireFile(cfg.data_path, "data");
  if (cfg.answers_path) RequireFile(*cfg.answers_path, "answers");
  if (cfg.eval_data_path) RequireFile(*cfg.eval_data_path, "eval data");
  if (cfg.eval_answers_path) RequireFile(*cfg.eval_answers_path, "eval answers");
  if (!(cfg.alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (training) {
    if (cfg.subtask == Subtask::kC || cfg.method == Method::kMlm) {
      throw InvalidArgument("training supports subtask A (classify, mc) and B (mc)");
    }
    if (!cfg.answers_path) throw InvalidArgument("training needs an answers file");
    Validate(cfg.training);
    return;
  }
  const bool needs_backend = cfg.method != Method::kIdentity;
  if (needs_backend && cfg.backend.kind == BackendSpec::Kind::kNone) {
    throw InvalidArgument("method '" + std::string(MethodName(cfg.method)) + "' needs --backend");
  }
  if (cfg.backend.kind == BackendSpec::Kind::kCount) RequireFile(cfg.backend.location, "corpus");
  if (cfg.method == Method::kLm) Validate(cfg.decode);
}

json ToJson(const RunConfig& cfg) {
  json decode = {{"max_new_tokens", cfg.decode.max_new_tokens},
                 {"strategy", StrategyName(cfg.decode.strategy)},
                 {"temperature", cfg.decode.temperature},
                 {"stop_tokens", cfg.decode.stop_tokens}};
  decode["top_k"] = cfg.decode.top_k ? json(*cfg.decode.top_k) : json(nullptr);
  json training = ToJson(cfg.training);
  training.erase("seed");
  auto opt = [](const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); };
  return {{"subtask", SubtaskName(cfg.subtask)},
          {"method", MethodName(cfg.method)},
          {"normalization", NormalizationName(cfg.normalization)},
          {"content_only", cfg.content_only},
          {"insert_separator", cfg.insert_separator},
          {"backend", FormatBackendSpec(cfg.backend)},
          {"alpha", cfg.alpha},
          {"data", cfg.data_path},
          {"answers", opt(cfg.answers_path)},
          {"eval_data", opt(cfg.eval_data_path)},
          {"eval_answers", opt(cfg.eval_answers_path)},
          {"out", cfg.out_root},
          {"seed", cfg.seed},
          {"decode", decode},
          {"training", training}};
}

RunConfig RunConfigFromJson(const json& j, RunConfig cfg) {
  try {
    auto opt = [&](const char* key, std::optional<std::string>& field) {
      if (auto it = j.find(key); it != j.end()) {
        field = it->is_null() ? std::nullopt : std::optional<std::string>(it->get<std::string>());
      }
    };
    if (j.contains("subtask")) cfg.subtask = ParseSubtask(j["subtask"].get<std::string>());
    if (j.contains("method")) cfg.method = ParseMethod(j["method"].get<std::string>());
    if (j.contains("normalization")) {
      cfg.normalization = ParseNormalization(j["normalization"].get<std::string>());
    }
    cfg.content_only = j.value("content_only", cfg.content_only);
    cfg.insert_separator = j.value("insert_separator", cfg.insert_separator);
    if (j.contains("backend")) cfg.backend = ParseBackendSpec(j["backend"].get<std::string>());
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.data_path = j.value("data", cfg.data_path);
    opt("answers", cfg.answers_path);
    opt("eval_data", cfg.eval_data_path);
    opt("eval_answers", cfg.eval_answers_path);
    cfg.out_root = j.value("out", cfg.out_root);
    cfg.seed = j.value("seed", cfg.seed);
    if (auto d = j.find("decode"); d != j.end()) {
      cfg.decode.max_new_tokens = d->value("max_new_tokens", cfg.decode.max_new_tokens);
      if (d->contains("strategy")) {
        cfg.decode.strategy = ParseStrategy((*d)["strategy"].get<std::string>());
      }
      cfg.decode.temperature = d->value("temperature", cfg.decode.temperature);
      if (auto k = d->find("top_k"); k != d->end()) {
        cfg.decode.top_k = k->is_null() ? std::nullopt : std::optional<int>(k->get<int>());
      }
      if (d->contains("stop_tokens")) {
        cfg.decode.stop_tokens = (*d)["stop_tokens"].get<std::set<std::string>>();
      }
    }
    if (auto t = j.find("training"); t != j.end()) {
      cfg.training = TrainingConfigFromJson(*t, cfg.training);
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

RunConfig LoadRunConfig(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("cannot parse config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config " + path + " is not a JSON object");
  return RunConfigFromJson(j, std::move(base));
}

namespace {

std::vector<std::string> ReadCorpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus " + path);
  std::vector<std::string> texts;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) texts.push_back(line);
  }
  if (texts.empty()) throw InvalidArgument("corpus " + path + " is empty");
  return texts;
}

std::shared_ptr<const service::Transport> MakeTransport(const BackendSpec& spec) {
  return std::make_shared<service::HttpTransport>(spec.location);
}

std::string Timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%d-%H%M%S");
  return os.str();
}

std::string CreateRunDir(const RunConfig& cfg, std::string_view command) {
  fs::create_directories(cfg.out_root);
  const std::string base = std::string(command) + "-" + std::string(MethodName(cfg.method)) +
                           "-" + Timestamp();
  for (int n = 0;; ++n) {
    fs::path dir = fs::path(cfg.out_root) / (n == 0 ? base : base + "-" + std::to_string(n));
    if (fs::create_directory(dir)) return dir.string();
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void WriteRows(const fs::path& path, const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& row : rows) csv::WriteRow(out, row);
}

// Common tail of every run: persists artifacts and fills the record.
RunRecord Finish(const RunConfig& cfg, std::string_view command,
                 std::vector<std::vector<std::string>> predictions, json metrics,
                 std::size_t failures, const std::string& log,
                 std::chrono::steady_clock::time_point start,
                 const std::vector<std::pair<std::string, std::string>>& extra_files = {}) {
  RunRecord rec;
  rec.run_dir = CreateRunDir(cfg, command);
  rec.config_snapshot = ToJson(cfg);
  rec.predictions = std::move(predictions);
  rec.failures = failures;
  rec.exit_code = failures == 0 ? 0 : 1;
  metrics["subtask"] = SubtaskName(cfg.subtask);
  metrics["method"] = MethodName(cfg.method);
  metrics["examples"] = rec.predictions.size();
  metrics["failures"] = failures;
  metrics["version"] = kToolkitVersion;
  metrics["timing_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  rec.metrics = metrics;

  const fs::path dir(rec.run_dir);
  WriteText(dir / "config.snapshot", rec.config_snapshot.dump(2) + "\n");
  if (!rec.predictions.empty()) WriteRows(dir / "predictions.csv", rec.predictions);
  WriteText(dir / "metrics.json", rec.metrics.dump(2) + "\n");
  WriteText(dir / "log.txt", log);
  for (const auto& [name, content] : extra_files) WriteText(dir / name, content);
  return rec;
}

std::string LogHeader(const RunConfig& cfg, std::string_view command) {
  std::ostringstream os;
  os << "comve " << kToolkitVersion << " " << command << "\n"
     << "subtask=" << SubtaskName(cfg.subtask) << " method=" << MethodName(cfg.method)
     << " normalization=" << NormalizationName(cfg.normalization)
     << " content_only=" << cfg.content_only << " backend=" << FormatBackendSpec(cfg.backend)
     << " seed=" << cfg.seed << "\n";
  return os.str();
}

template <typename T>
void LogFailures(std::ostream& log, const batch::BatchResult<T>& result,
                 const std::vector<std::string>& ids) {
  for (std::size_t i = 0; i < result.errors.size(); ++i) {
    if (result.errors[i]) log << "error " << ids[i] << ": " << *result.errors[i] << "\n";
  }
}

template <typename Item>
std::vector<std::string> Ids(const std::vector<Item>& items) {
  std::vector<std::string> ids;
  ids.reserve(items.size());
  for (const auto& it : items) ids.push_back(it.id);
  return ids;
}

// Label rows and, when every example is labeled, accuracy over all examples
// (failed examples count as wrong).
void AddAccuracy(json& metrics, const std::vector<std::optional<int>>& predicted,
                 const std::vector<std::optional<int>>& gold) {
  std::vector<int> p, g;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!gold[i]) return;
    g.push_back(*gold[i]);
    p.push_back(predicted[i].value_or(-1));
  }
  if (!g.empty()) metrics["accuracy"] = ToJson(Accuracy(p, g));
}

std::vector<std::vector<std::string>> LabelRows(const std::vector<std::string>& ids,
                                                const std::vector<std::optional<int>>& labels) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    rows.push_back({ids[i], labels[i] ? std::to_string(*labels[i]) : std::string()});
  }
  return rows;
}

RunRecord RunSubtaskA(const RunConfig& cfg, std::chrono::steady_clock::time_point start) {
  const auto pairs = LoadStatementPairs(cfg.data_path, cfg.answers_path);
  if (pairs.empty()) throw InvalidArgument("dataset " + cfg.data_path + " has no examples");
  const std::vector<std::string> ids = Ids(pairs);
  std::ostringstream log;
  log << LogHeader(cfg, "validate-a") << "examples=" << pairs.size() << "\n";

  std::vector<std::optional<int>> predicted(pairs.size());
  std::size_t failures = 0;
  std::size_t ties = 0;
  std::size_t floored = 0;
  const bool service = cfg.backend.kind == BackendSpec::Kind::kService;
  const PlausibilityOptions options{cfg.normalization, cfg.content_only, kDefaultProbabilityFloor};

  std::unique_ptr<MaskedLM> masked;
  if (cfg.method != Method::kClassify) {
    if (service) {
      masked = std::make_unique<service::ServiceMaskedLM>(MakeTransport(cfg.backend));
    } else {
      masked = TrainCountBackend(ReadCorpus(cfg.backend.location), cfg.alpha);
    }
  }

  if (cfg.method == Method::kMlm) {
    const auto result = batch::ScorePairsParallel(pairs, *masked, options);
    LogFailures(log, result, ids);
    failures = result.failures();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (result.errors[i]) continue;
      const PlausibleChoice& c = result.values[i];
      predicted[i] = 1 - c.index;
      ties += c.tie;
      floored += c.scores[0].floored || c.scores[1].floored;
    }
  } else if (cfg.method == Method::kClassify) {
    std::unique_ptr<PairClassifier> classifier;
    if (service) {
      classifier = std::make_unique<service::ServicePairClassifier>(MakeTransport(cfg.backend));
    } else {
      classifier = std::make_unique<UnknownCountClassifier>(ReadCorpus(cfg.backend.location));
    }
    const auto result = batch::ClassifyPairsParallel(pairs, *classifier);
    LogFailures(log, result, ids);
    failures = result.failures();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (result.errors[i]) continue;
      predicted[i] = result.values[i].nonsense_index;
      ties += result.values[i].tie;
    }
  } else {
    std::unique_ptr<ChoiceScorer> scorer;
    if (service) {
      scorer = std::make_unique<service::ServiceChoiceScorer>(MakeTransport(cfg.backend));
    } else {
      scorer = std::make_unique<PllChoiceScorer>(*masked, options);
    }
    std::vector<ChoiceSet> sets;
    sets.reserve(pairs.size());
    for (const auto& p : pairs) sets.push_back(BuildValidationChoices(p, *scorer));
    const auto result = batch::SelectChoicesParallel(sets, *scorer);
    LogFailures(log, result, ids);
    failures = result.failures();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (result.errors[i]) continue;
      predicted[i] = 1 - result.values[i].index;
      ties += result.values[i].tie;
    }
  }
  log << "ties=" << ties << " floored=" << floored << " failures=" << failures << "\n";

  json metrics = json::object();
  if (cfg.method != Method::kClassify) metrics["normalization"] = NormalizationName(cfg.normalization);
  metrics["ties"] = ties;
  std::vector<std::optional<int>> gold;
  for (const auto& p : pairs) gold.push_back(p.nonsense_index);
  AddAccuracy(metrics, predicted, gold);
  return Finish(cfg, "validate-a", LabelRows(ids, predicted), std::move(metrics), failures,
                log.str(), start);
}

RunRecord RunSubtaskB(const RunConfig& cfg, std::chrono::steady_clock::time_point start) {
  const auto items = LoadExplanationItems(cfg.data_path, cfg.answers_path);
  if (items.empty()) throw InvalidArgument("dataset " + cfg.data_path + " has no examples");
  const std::vector<std::string> ids = Ids(items);
  std::ostringstream log;
  log << LogHeader(cfg, "explain-b") << "examples=" << items.size() << "\n";

  std::unique_ptr<MaskedLM> masked;
  std::unique_ptr<ChoiceScorer> scorer;
  const PlausibilityOptions options{cfg.normalization, cfg.content_only, kDefaultProbabilityFloor};
  if (cfg.backend.kind == BackendSpec::Kind::kService) {
    scorer = std::make_unique<service::ServiceChoiceScorer>(MakeTransport(cfg.backend));
  } else {
    masked = TrainCountBackend(ReadCorpus(cfg.backend.location), cfg.alpha);
    scorer = std::make_unique<PllChoiceScorer>(*masked, options);
  }
  std::vector<ChoiceSet> sets;
  sets.reserve(items.size());
  const ExplanationOptions eopts{cfg.insert_separator};
  for (const auto& item : items) sets.push_back(BuildExplanationCandidates(item, *scorer, eopts));
  const auto result = batch::SelectChoicesParallel(sets, *scorer);
  LogFailures(log, result, ids);

  std::vector<std::optional<int>> predicted(items.size());
  std::size_t ties = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (result.errors[i]) continue;
    predicted[i] = result.values[i].index;
    ties += result.values[i].tie;
  }
  log << "ties=" << ties << " failures=" << result.failures() << "\n";
  json metrics = {{"normalization", NormalizationName(cfg.normalization)}, {"ties", ties}};
  std::vector<std::optional<int>> gold;
  for (const auto& it : items) gold.push_back(it.gold_index);
  AddAccuracy(metrics, predicted, gold);
  return Finish(cfg, "explain-b", LabelRows(ids, predicted), std::move(metrics),
                result.failures(), log.str(), start);
}

RunRecord RunSubtaskC(const RunConfig& cfg, std::chrono::steady_clock::time_point start) {
  const auto items = LoadGenerationItems(cfg.data_path, cfg.answers_path);
  if (items.empty()) throw InvalidArgument("dataset " + cfg.data_path + " has no examples");
  std::ostringstream log;
  log << LogHeader(cfg, "generate-c") << "examples=" << items.size() << "\n";

  DecodeConfig decode = cfg.decode;
  decode.seed = cfg.seed;
  std::unique_ptr<Generator> generator;
  if (cfg.method == Method::kLm) {
    if (cfg.backend.kind == BackendSpec::Kind::kService) {
      generator = std::make_unique<service::ServiceGenerator>(MakeTransport(cfg.backend));
    } else {
      generator = std::make_unique<BigramGenerator>(ReadCorpus(cfg.backend.location), cfg.alpha);
    }
  }
  const GenerationSystem system =
      cfg.method == Method::kIdentity ? GenerationSystem::kIdentity : GenerationSystem::kLanguageModel;
  const std::vector<GeneratedCandidate> out =
      BatchGenerate(items, system, generator.get(), decode);

  std::vector<std::vector<std::string>> rows;
  std::size_t failures = 0;
  std::vector<std::string> cands, bleu_ids;
  std::vector<std::vector<std::string>> refs;
  bool labeled = true;
  for (std::size_t i = 0; i < out.size(); ++i) {
    rows.push_back({out[i].id, out[i].text});
    if (out[i].error) {
      ++failures;
      log << "error " << out[i].id << ": " << *out[i].error << "\n";
      continue;
    }
    if (items[i].references.empty()) labeled = false;
    cands.push_back(out[i].text);
    refs.push_back(items[i].references);
    bleu_ids.push_back(out[i].id);
  }
  log << "failures=" << failures << "\n";
  json metrics = json::object();
  if (labeled && !cands.empty()) metrics["bleu"] = ToJson(CorpusBleu(cands, refs, bleu_ids));
  return Finish(cfg, "generate-c", std::move(rows), std::move(metrics), failures, log.str(), start);
}

}  // namespace

RunRecord Run(const RunConfig& cfg) {
  Validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  switch (cfg.subtask) {
    case Subtask::kA: return RunSubtaskA(cfg, start);
    case Subtask::kB: return RunSubtaskB(cfg, start);
    case Subtask::kC: return RunSubtaskC(cfg, start);
  }
  throw InvalidArgument("unknown subtask");
}

namespace {

// Training data and model for train / sweep.
struct TrainingSetup {
  std::unique_ptr<Trainable> model;
  std::vector<TrainingItem> train;
  std::vector<TrainingItem> eval;  // labeled eval examples only
  std::vector<std::string> eval_ids;
  // Maps a model argmax on an eval input to the predicted label.
  bool predicts_sensible = false;
};

std::vector<std::string> StatementTexts(const std::vector<StatementPair>& pairs) {
  std::vector<std::string> texts;
  for (const auto& p : pairs) {
    texts.push_back(p.sent0);
    texts.push_back(p.sent1);
  }
  return texts;
}

TrainingSetup PrepareTraining(const RunConfig& cfg, bool need_eval_labels) {
  TrainingSetup s;
  if (cfg.subtask == Subtask::kA) {
    const auto pairs = LoadStatementPairs(cfg.data_path, cfg.answers_path);
    std::vector<StatementPair> eval_pairs;
    if (cfg.eval_data_path) eval_pairs = LoadStatementPairs(*cfg.eval_data_path, cfg.eval_answers_path);
    LinearBagScorer scorer(StatementTexts(pairs));
    if (cfg.method == Method::kClassify) {
      auto clf = std::make_unique<LinearBagPairClassifier>(scorer);
      s.train = PairClassificationItems(pairs, *clf);
      for (const auto& p : eval_pairs) {
        s.eval.push_back({{ConcatPair(p, *clf)}, p.nonsense_index.value_or(0)});
        s.eval_ids.push_back(p.id);
      }
      s.model = std::move(clf);
    } else {
      std::vector<ChoiceSet> sets;
      for (const auto& p : pairs) sets.push_back(BuildValidationChoices(p, scorer));
      s.train = ChoiceTrainingItems(sets);
      for (const auto& p : eval_pairs) {
        ChoiceSet set = BuildValidationChoices(p, scorer);
        s.eval.push_back({set.candidate_sequences, set.gold_index.value_or(0)});
        s.eval_ids.push_back(p.id);
      }
      s.predicts_sensible = true;
      s.model = std::make_unique<LinearBagScorer>(std::move(scorer));
    }
    if (need_eval_labels && !cfg.eval_answers_path) {
      throw InvalidArgument("sweep needs --eval-data and --eval-answers");
    }
  } else {
    const auto items = LoadExplanationItems(cfg.data_path, cfg.answers_path);
    std::vector<ExplanationItem> eval_items;
    if (cfg.eval_data_path) {
      eval_items = LoadExplanationItems(*cfg.eval_data_path, cfg.eval_answers_path);
    }
    std::vector<std::string> texts;
    for (const auto& it : items) {
      texts.push_back(it.false_statement);
      texts.insert(texts.end(), it.options.begin(), it.options.end());
    }
    LinearBagScorer scorer(texts);
    const ExplanationOptions eopts{cfg.insert_separator};
    std::vector<ChoiceSet> sets;
    for (const auto& it : items) sets.push_back(BuildExplanationCandidates(it, scorer, eopts));
    s.train = ChoiceTrainingItems(sets);
    for (const auto& it : eval_items) {
      ChoiceSet set = BuildExplanationCandidates(it, scorer, eopts);
      s.eval.push_back({set.candidate_sequences, set.gold_index.value_or(0)});
      s.eval_ids.push_back(it.id);
    }
    s.model = std::make_unique<LinearBagScorer>(std::move(scorer));
    if (need_eval_labels && !cfg.eval_answers_path) {
      throw InvalidArgument("sweep needs --eval-data and --eval-answers");
    }
  }
  if (s.train.empty()) throw InvalidArgument("training dataset is empty");
  return s;
}

}  // namespace

RunRecord RunTrain(const RunConfig& cfg) {
  Validate(cfg, /*training=*/true);
  const auto start = std::chrono::steady_clock::now();
  TrainingSetup setup = PrepareTraining(cfg, false);
  TrainingConfig tcfg = cfg.training;
  tcfg.seed = cfg.seed;
  const TrainingHistory history = FineTune(*setup.model, setup.train, tcfg);

  std::ostringstream log;
  log << LogHeader(cfg, "train") << "train_examples=" << setup.train.size()
      << " steps=" << history.steps.size() << " final_loss=" << history.final_loss << "\n";

  std::vector<std::vector<std::string>> rows;
  json metrics = {{"final_loss", history.final_loss},
                  {"train_accuracy", history.final_accuracy},
                  {"steps", history.steps.size()}};
  if (!setup.eval.empty()) {
    std::vector<int> predicted, gold;
    for (std::size_t i = 0; i < setup.eval.size(); ++i) {
      int index = DecideChoice(setup.model->Logits(setup.eval[i])).index;
      int gold_index = setup.eval[i].gold;
      if (setup.predicts_sensible && cfg.subtask == Subtask::kA) {
        index = 1 - index;
        gold_index = 1 - gold_index;
      }
      rows.push_back({setup.eval_ids[i], std::to_string(index)});
      predicted.push_back(index);
      gold.push_back(gold_index);
    }
    if (cfg.eval_answers_path) metrics["accuracy"] = ToJson(Accuracy(predicted, gold));
  }

  std::ostringstream hist;
  hist.precision(17);
  hist << "step,lr,loss\n";
  for (const StepRecord& r : history.steps) hist << r.step << ',' << r.lr << ',' << r.loss << '\n';
  json summary = {{"training", ToJson(tcfg)},
                  {"steps", history.steps.size()},
                  {"final_loss", history.final_loss},
                  {"train_accuracy", history.final_accuracy}};
  if (metrics.contains("accuracy")) summary["eval_accuracy"] = metrics["accuracy"]["accuracy"];
  return Finish(cfg, "train", std::move(rows), std::move(metrics), 0, log.str(), start,
                {{"history.csv", hist.str()}, {"summary.json", summary.dump(2) + "\n"}});
}

RunRecord RunSweep(const RunConfig& cfg, std::vector<double> learning_rates) {
  Validate(cfg, /*training=*/true);
  if (!cfg.eval_data_path || !cfg.eval_answers_path) {
    throw InvalidArgument("sweep needs --eval-data and --eval-answers");
  }
  if (learning_rates.empty()) learning_rates = DefaultLearningRateGrid();
  const auto start = std::chrono::steady_clock::now();
  TrainingSetup setup = PrepareTraining(cfg, true);
  std::vector<TrainingConfig> grid;
  for (double lr : learning_rates) {
    TrainingConfig t = cfg.training;
    t.learning_rate = lr;
    t.seed = cfg.seed;
    grid.push_back(t);
  }
  const std::vector<SweepResult> ranked =
      HyperparameterSweep(grid, *setup.model, setup.train, setup.eval);

  std::ostringstream log;
  log << LogHeader(cfg, "sweep");
  json results = json::array();
  for (const SweepResult& r : ranked) {
    results.push_back({{"config_index", r.config_index},
                       {"learning_rate", r.config.learning_rate},
                       {"accuracy", r.accuracy},
                       {"final_loss", r.final_loss}});
    log << "lr=" << r.config.learning_rate << " accuracy=" << r.accuracy << "\n";
  }
  json metrics = {{"best_learning_rate", ranked.front().config.learning_rate},
                  {"best_accuracy", ranked.front().accuracy}};
  return Finish(cfg, "sweep", {}, std::move(metrics), 0, log.str(), start,
                {{"sweep.json", results.dump(2) + "\n"}});
}

namespace {

std::vector<csv::Row> ReadKeyedRows(const std::string& path) {
  std::vector<csv::Row> rows = csv::ReadFile(path);
  if (!rows.empty() && !rows.front().fields.empty() && rows.front().fields[0] == "id") {
    rows.erase(rows.begin());
  }
  std::set<std::string> seen;
  for (const csv::Row& row : rows) {
    if (row.fields.size() < 2) throw ParseError(path, row.line, "expected at least two columns");
    if (!seen.insert(row.fields[0]).second) {
      throw ParseError(path, row.line, "duplicate id '" + row.fields[0] + "'");
    }
  }
  return rows;
}

void CheckAlignment(const std::vector<csv::Row>& predictions, const std::vector<csv::Row>& gold) {
  std::set<std::string> pred_ids, gold_ids;
  for (const auto& r : predictions) pred_ids.insert(r.fields[0]);
  for (const auto& r : gold) gold_ids.insert(r.fields[0]);
  std::vector<std::string> missing, extra;
  std::set_difference(gold_ids.begin(), gold_ids.end(), pred_ids.begin(), pred_ids.end(),
                      std::back_inserter(missing));
  std::set_difference(pred_ids.begin(), pred_ids.end(), gold_ids.begin(), gold_ids.end(),
                      std::back_inserter(extra));
  if (missing.empty() && extra.empty()) return;
  std::ostringstream os;
  os << "prediction ids do not match gold ids;";
  if (!missing.empty()) {
    os << " missing predictions:";
    for (const auto& id : missing) os << " " << id;
  }
  if (!extra.empty()) {
    os << " unknown ids:";
    for (const auto& id : extra) os << " " << id;
  }
  throw InvalidArgument(os.str());
}

int ParseEvalLabel(const std::string& path, const csv::Row& row, int classes, bool allow_empty) {
  const std::string& s = row.fields[1];
  if (s.empty() && allow_empty) return -1;
  if (s.size() == 1) {
    if (s[0] >= '0' && s[0] < '0' + classes) return s[0] - '0';
    if (classes == 3 && s[0] >= 'A' && s[0] <= 'C') return s[0] - 'A';
  }
  throw ParseError(path, row.line, "invalid label '" + s + "'");
}

}  // namespace

json Evaluate(const std::string& predictions_path, const std::string& gold_path, Subtask subtask) {
  const std::vector<csv::Row> pred = ReadKeyedRows(predictions_path);
  const std::vector<csv::Row> gold = ReadKeyedRows(gold_path);
  if (gold.empty()) throw InvalidArgument("gold file " + gold_path + " is empty");
  CheckAlignment(pred, gold);
  std::unordered_map<std::string, const csv::Row*> by_id;
  for (const auto& r : pred) by_id.emplace(r.fields[0], &r);

  json report = {{"subtask", SubtaskName(subtask)}};
  if (subtask == Subtask::kC) {
    std::vector<std::string> cands, ids;
    std::vector<std::vector<std::string>> refs;
    for (const auto& g : gold) {
      const csv::Row& p = *by_id.at(g.fields[0]);
      ids.push_back(g.fields[0]);
      cands.push_back(p.fields[1]);
      std::vector<std::string> r;
      for (std::size_t i = 1; i < g.fields.size(); ++i) {
        if (g.fields[i].find_first_not_of(" \t\r\n") != std::string::npos) r.push_back(g.fields[i]);
      }
      refs.push_back(std::move(r));
    }
    report["bleu"] = ToJson(CorpusBleu(cands, refs, ids));
    return report;
  }
  const int classes = subtask == Subtask::kA ? 2 : 3;
  std::vector<int> p, g;
  for (const auto& gr : gold) {
    g.push_back(ParseEvalLabel(gold_path, gr, classes, false));
    p.push_back(ParseEvalLabel(predictions_path, *by_id.at(gr.fields[0]), classes, true));
  }
  report["accuracy"] = ToJson(Accuracy(p, g));
  return report;
}

std::vector<ComparisonRow> Compare(const std::vector<std::string>& run_dirs) {
  if (run_dirs.size() < 2) throw InvalidArgument("compare needs at least two run directories");
  std::vector<ComparisonRow> rows;
  std::optional<std::string> subtask;
  for (const std::string& dir : run_dirs) {
    const fs::path path = fs::path(dir) / "metrics.json";
    std::ifstream in(path);
    if (!in) throw InvalidArgument("no metrics.json in " + dir);
    json m;
    try {
      m = json::parse(in);
    } catch (const json::exception& e) {
      throw Error("cannot parse " + path.string() + ": " + e.what());
    }
    const std::string st = m.value("subtask", "");
    if (subtask && *subtask != st) {
      throw InvalidArgument("cannot compare runs of different subtasks (" + *subtask + " vs " + st + ")");
    }
    subtask = st;
    ComparisonRow row;
    row.run_dir = dir;
    row.method = m.value("method", "?");
    if (m.contains("normalization")) row.method += "/" + m["normalization"].get<std::string>();
    if (m.contains("accuracy")) {
      row.metric_name = "accuracy";
      row.metric = m["accuracy"]["accuracy"].get<double>();
    } else if (m.contains("bleu")) {
      row.metric_name = "bleu";
      row.metric = m["bleu"]["score"].get<double>();
    } else if (m.contains("best_accuracy")) {
      row.metric_name = "accuracy";
      row.metric = m["best_accuracy"].get<double>();
    } else {
      throw InvalidArgument(dir + " has no metric to compare");
    }
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) { return a.metric > b.metric; });
  return rows;
}

std::string RenderComparison(const std::vector<ComparisonRow>& rows) {
  std::size_t method_width = 6;
  for (const auto& r : rows) method_width = std::max(method_width, r.method.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(method_width) + 2) << "method" << std::setw(12)
     << "metric" << "run\n";
  for (const auto& r : rows) {
    std::ostringstream value;
    value << std::fixed << std::setprecision(r.metric_name == "bleu" ? 2 : 4) << r.metric;
    os << std::left << std::setw(static_cast<int>(method_width) + 2) << r.method << std::setw(12)
       << value.str() << r.run_dir << "\n";
  }
  return os.str();
}

json ToJson(const std::vector<ComparisonRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"run_dir", r.run_dir},
                   {"method", r.method},
                   {"metric_name", r.metric_name},
                   {"metric", r.metric}});
  }
  return out;
}

namespace {

struct LengthStats {
  std::size_t count = 0;
  std::size_t total_tokens = 0;
  std::size_t max_tokens = 0;
  std::size_t terminated = 0;

  void Add(const std::string& text) {
    const std::vector<std::string> toks = TokenizeReference(text);
    ++count;
    total_tokens += toks.size();
    max_tokens = std::max(max_tokens, toks.size());
    const std::size_t end = text.find_last_not_of(" \t\r\n");
    if (end != std::string::npos && (text[end] == '.' || text[end] == '!' || text[end] == '?')) {
      ++terminated;
    }
  }

  json ToJson() const {
    return {{"count", count},
            {"mean_tokens", count ? static_cast<double>(total_tokens) / count : 0.0},
            {"max_tokens", max_tokens},
            {"ending_with_terminal_punctuation", terminated}};
  }
};

}  // namespace

json DatasetStats(Subtask subtask, const std::string& data_path,
                  const std::optional<std::string>& answers_path) {
  json out = {{"subtask", SubtaskName(subtask)}};
  LengthStats statements;
  if (subtask == Subtask::kA) {
    const auto pairs = LoadStatementPairs(data_path, answers_path);
    std::vector<std::size_t> labels(2, 0);
    std::size_t labeled = 0;
    for (const auto& p : pairs) {
      statements.Add(p.sent0);
      statements.Add(p.sent1);
      if (p.nonsense_index) {
        ++labeled;
        ++labels[static_cast<std::size_t>(*p.nonsense_index)];
      }
    }
    out["examples"] = pairs.size();
    out["labeled"] = labeled;
    out["label_counts"] = labels;
  } else if (subtask == Subtask::kB) {
    const auto items = LoadExplanationItems(data_path, answers_path);
    LengthStats options;
    std::vector<std::size_t> labels(3, 0);
    std::size_t labeled = 0;
    for (const auto& it : items) {
      statements.Add(it.false_statement);
      for (const auto& o : it.options) options.Add(o);
      if (it.gold_index) {
        ++labeled;
        ++labels[static_cast<std::size_t>(*it.gold_index)];
      }
    }
    out["examples"] = items.size();
    out["labeled"] = labeled;
    out["label_counts"] = labels;
    out["options"] = options.ToJson();
  } else {
    const auto items = LoadGenerationItems(data_path, answers_path);
    LengthStats refs;
    std::size_t labeled = 0;
    for (const auto& it : items) {
      statements.Add(it.false_statement);
      for (const auto& r : it.references) refs.Add(r);
      labeled += !it.references.empty();
    }
    out["examples"] = items.size();
    out["labeled"] = labeled;
    out["references"] = refs.ToJson();
  }
  out["statements"] = statements.ToJson();
  return out;
}

}  // namespace comve
