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

#include <cstdlib>
#include <filesystem>

#include <gtest/gtest.h>

#include "comve/error.h"
#include "comve/metrics.h"
#include "comve/runner.h"
#include "oracles.h"

namespace comve {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig SyntheticConfig(const oracle::TempDir& dir, const oracle::SyntheticA& a) {
  RunConfig cfg;
  cfg.subtask = Subtask::kA;
  cfg.method = Method::kMlm;
  cfg.backend = ParseBackendSpec("count:" + a.corpus);
  cfg.data_path = a.data;
  cfg.answers_path = a.answers;
  cfg.out_root = dir / "runs";
  return cfg;
}

std::size_t CountEntries(const std::string& path) {
  if (!fs::exists(path)) return 0;
  return static_cast<std::size_t>(std::distance(fs::directory_iterator(path), fs::directory_iterator()));
}

TEST(Runner, SyntheticSubtaskAIsPerfect) {
  oracle::TempDir dir;
  const auto a = oracle::WriteSyntheticA(dir, 50, 1);
  const RunRecord rec = comve::Run(SyntheticConfig(dir, a));
  EXPECT_EQ(rec.exit_code, 0);
  EXPECT_EQ(rec.predictions.size(), 50u);
  EXPECT_EQ(rec.metrics["accuracy"]["accuracy"].get<double>(), 1.0);
  for (const char* f : {"config.snapshot", "predictions.csv", "metrics.json", "log.txt"}) {
    EXPECT_TRUE(fs::exists(fs::path(rec.run_dir) / f)) << f;
  }
  EXPECT_EQ(rec.metrics["version"], kToolkitVersion);
  EXPECT_TRUE(rec.metrics.contains("timing_ms"));
}

TEST(Runner, EveryMethodRuns) {
  oracle::TempDir dir;
  const auto a = oracle::WriteSyntheticA(dir, 20, 2);
  for (Method m : {Method::kMlm, Method::kClassify, Method::kMc}) {
    RunConfig cfg = SyntheticConfig(dir, a);
    cfg.method = m;
    for (auto mode : {Normalization::kRaw, Normalization::kPerplexity}) {
      cfg.normalization = mode;
      const RunRecord rec = comve::Run(cfg);
      EXPECT_EQ(rec.metrics["accuracy"]["accuracy"].get<double>(), 1.0) << MethodName(m);
    }
  }
}

TEST(Runner, MissingDataCreatesNoRunDir) {
  oracle::TempDir dir;
  const auto a = oracle::WriteSyntheticA(dir, 5, 3);
  RunConfig cfg = SyntheticConfig(dir, a);
  cfg.data_path = dir / "missing.csv";
  EXPECT_THROW(comve::Run(cfg), InvalidArgument);
  EXPECT_EQ(CountEntries(cfg.out_root), 0u);
}

TEST(Runner, MalformedDataCreatesNoRunDir) {
  oracle::TempDir dir;
  const auto a = oracle::WriteSyntheticA(dir, 5, 3);
  RunConfig cfg = SyntheticConfig(dir, a);
  cfg.data_path = dir.Write("bad.csv", "id,sent0,sent1\n1,only\n");
  cfg.answers_path.reset();
  EXPECT_THROW(comve::Run(cfg), ParseError);
  EXPECT_EQ(CountEntries(cfg.out_root), 0u);
}

TEST(Runner, MethodMustFitSubtask) {
  oracle::TempDir dir;
  const auto a = oracle::WriteSyntheticA(dir, 5, 3);
  RunConfig cfg = SyntheticConfig(dir, a);
  cfg.method = Method::kLm;
  EXPECT_THROW(comve::Run(cfg), InvalidArgument);
  cfg.method = Method::kMlm;
  cfg.backend = {};
  EXPECT_THROW(comve::Run(cfg), InvalidArgument);
  EXPECT_TRUE(MethodValidFor(Subtask::kB, Method::kMc));
  EXPECT_FALSE(MethodValidFor(Subtask::kB, Method::kMlm));
  EXPECT_FALSE(MethodValidFor(Subtask::kC, Method::kMc));
}

TEST(Runner, IdentityCandidatesEqualStatements) {
  oracle::TempDir dir;
  const auto c = oracle::WriteSyntheticC(dir, 10, 4);
  RunConfig cfg;
  cfg.subtask = Subtask::kC;
  cfg.method = Method::kIdentity;
  cfg.data_path = c.data;
  cfg.answers_path = c.answers;
  cfg.out_root = dir / "runs";
  const RunRecord rec = comve::Run(cfg);
  ASSERT_EQ(rec.predictions.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(rec.predictions[i][1], c.statements[i]);
  EXPECT_EQ(rec.metrics["bleu"]["score"].get<double>(),
            CorpusBleu(c.statements, c.references).score);
}

TEST(Runner, SubtaskBRuns) {
  oracle::TempDir dir;
  const auto corpus = dir.Write("corpus.txt", "he drinks apple .\napple can not be drunk .\n");
  const auto data = dir.Write("b.csv",
                              "id,FalseSent,OptionA,OptionB,OptionC\n"
                              "1,He drinks apple.,Trees grow.,Apple can not be drunk.,Dogs bark.\n");
  const auto answers = dir.Write("b_ans.csv", "1,1\n");
  RunConfig cfg;
  cfg.subtask = Subtask::kB;
  cfg.method = Method::kMc;
  cfg.backend = ParseBackendSpec("count:" + corpus);
  cfg.data_path = data;
  cfg.answers_path = answers;
  cfg.out_root = dir / "runs";
  const RunRecord rec = comve::Run(cfg);
  EXPECT_EQ(rec.predictions[0][1], "1");
  EXPECT_EQ(rec.metrics["accuracy"]["accuracy"].get<double>(), 1.0);
}

TEST(Runner, UnreachableServiceIsPartialFailure) {
  oracle::TempDir dir;
  const auto a = oracle::WriteSyntheticA(dir, 3, 5);
  RunConfig cfg = SyntheticConfig(dir, a);
  cfg.backend = ParseBackendSpec("service:http://127.0.0.1:1/");
  const RunRecord rec = comve::Run(cfg);
  EXPECT_EQ(rec.exit_code, 1);
  EXPECT_EQ(rec.failures, 3u);
  EXPECT_EQ(rec.predictions.size(), 3u);
  EXPECT_EQ(rec.predictions[0][1], "");
  EXPECT_EQ(rec.metrics["accuracy"]["accuracy"].get<double>(), 0.0);
  EXPECT_NE(oracle::ReadFile(rec.run_dir + "/log.txt").find("error p0"), std::string::npos);
}

TEST(Runner, SnapshotReRunsByteIdentically) {
  oracle::TempDir dir;
  const auto a = oracle::WriteSyntheticA(dir, 30, 6);
  const RunRecord first = comve::Run(SyntheticConfig(dir, a));
  const RunConfig again = LoadRunConfig(first.run_dir + "/config.snapshot");
  EXPECT_EQ(ToJson(again), first.config_snapshot);
  const RunRecord second = comve::Run(again);
  EXPECT_NE(first.run_dir, second.run_dir);
  EXPECT_EQ(oracle::ReadFile(first.run_dir + "/predictions.csv"),
            oracle::ReadFile(second.run_dir + "/predictions.csv"));
  EXPECT_EQ(oracle::ReadFile(first.run_dir + "/config.snapshot"),
            oracle::ReadFile(second.run_dir + "/config.snapshot"));
}

TEST(Runner, ConfigJsonOverlay) {
  RunConfig base;
  base.alpha = 2.0;
  const RunConfig cfg = RunConfigFromJson(
      json{{"subtask", "C"}, {"method", "lm"}, {"decode", {{"max_new_tokens", 5}, {"top_k", 3}}},
           {"training", {{"learning_rate", 2e-5}}}},
      base);
  EXPECT_EQ(cfg.subtask, Subtask::kC);
  EXPECT_EQ(cfg.method, Method::kLm);
  EXPECT_EQ(cfg.alpha, 2.0);
  EXPECT_EQ(cfg.decode.max_new_tokens, 5);
  EXPECT_EQ(cfg.decode.top_k, 3);
  EXPECT_EQ(cfg.training.learning_rate, 2e-5);
  EXPECT_EQ(cfg.training.warmup_steps, 320);
  EXPECT_THROW(RunConfigFromJson(json{{"method", "bert"}}), InvalidArgument);
  EXPECT_THROW(RunConfigFromJson(json{{"alpha", "high"}}), InvalidArgument);
}

TEST(Runner, BackendSpecs) {
  EXPECT_EQ(ParseBackendSpec("count:/x/y.txt").kind, BackendSpec::Kind::kCount);
  EXPECT_EQ(ParseBackendSpec("service:http://h:1/p").location, "http://h:1/p");
  EXPECT_EQ(FormatBackendSpec(ParseBackendSpec("count:c.txt")), "count:c.txt");
  EXPECT_THROW(ParseBackendSpec("count:"), InvalidArgument);
  EXPECT_THROW(ParseBackendSpec("gpu:0"), InvalidArgument);
}

TEST(Evaluate, IdenticalLabelsArePerfect) {
  oracle::TempDir dir;
  const auto gold = dir.Write("g.csv", "1,0\n2,1\n3,1\n");
  const json r = Evaluate(gold, gold, Subtask::kA);
  EXPECT_EQ(r["accuracy"]["accuracy"].get<double>(), 1.0);
  EXPECT_EQ(r["subtask"], "A");
}

TEST(Evaluate, MisalignedIdsListed) {
  oracle::TempDir dir;
  const auto gold = dir.Write("g.csv", "1,0\n2,1\n");
  const auto pred = dir.Write("p.csv", "1,0\n3,1\n");
  try {
    Evaluate(pred, gold, Subtask::kA);
    FAIL();
  } catch (const InvalidArgument& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("missing predictions: 2"), std::string::npos) << what;
    EXPECT_NE(what.find("unknown ids: 3"), std::string::npos) << what;
  }
}

TEST(Evaluate, SubtaskBLetters) {
  oracle::TempDir dir;
  const auto gold = dir.Write("g.csv", "1,A\n2,C\n");
  const auto pred = dir.Write("p.csv", "2,2\n1,1\n");
  EXPECT_EQ(Evaluate(pred, gold, Subtask::kB)["accuracy"]["correct"].get<int>(), 1);
}

TEST(Evaluate, StatementsFileScoresAsIdentity) {
  oracle::TempDir dir;
  const auto c = oracle::WriteSyntheticC(dir, 12, 7);
  const json r = Evaluate(c.data, c.answers, Subtask::kC);
  EXPECT_EQ(r["bleu"]["score"].get<double>(), CorpusBleu(c.statements, c.references).score);
}

TEST(Evaluate, MatchesStoredRunMetric) {
  oracle::TempDir dir;
  const auto a = oracle::WriteSyntheticA(dir, 40, 8);
  RunConfig cfg = SyntheticConfig(dir, a);
  cfg.method = Method::kClassify;
  const RunRecord rec = comve::Run(cfg);
  const json r = Evaluate(rec.run_dir + "/predictions.csv", a.answers, Subtask::kA);
  EXPECT_EQ(r["accuracy"], rec.metrics["accuracy"]);
}

void WriteMetrics(const oracle::TempDir& dir, const std::string& name, const json& m) {
  fs::create_directories(dir.path() / name);
  dir.Write(name + "/metrics.json", m.dump());
}

TEST(Compare, SortsDescendingAndStable) {
  oracle::TempDir dir;
  WriteMetrics(dir, "r1", {{"subtask", "A"}, {"method", "mlm"}, {"accuracy", {{"accuracy", 0.74}}}});
  WriteMetrics(dir, "r2", {{"subtask", "A"}, {"method", "mc"}, {"accuracy", {{"accuracy", 0.96}}}});
  WriteMetrics(dir, "r3", {{"subtask", "A"}, {"method", "classify"}, {"accuracy", {{"accuracy", 0.74}}}});
  const auto rows = Compare({dir / "r1", dir / "r2", dir / "r3"});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].metric, 0.96);
  EXPECT_EQ(rows[1].run_dir, dir / "r1");
  EXPECT_EQ(rows[2].run_dir, dir / "r3");
  const std::string table = RenderComparison(rows);
  EXPECT_LT(table.find("0.9600"), table.find("0.7400"));
  EXPECT_EQ(ToJson(rows)[0]["metric_name"], "accuracy");
}

TEST(Compare, Errors) {
  oracle::TempDir dir;
  WriteMetrics(dir, "a", {{"subtask", "A"}, {"method", "mlm"}, {"accuracy", {{"accuracy", 0.5}}}});
  WriteMetrics(dir, "c", {{"subtask", "C"}, {"method", "identity"}, {"bleu", {{"score", 17.2}}}});
  EXPECT_THROW(Compare({dir / "a"}), InvalidArgument);
  EXPECT_THROW(Compare({dir / "a", dir / "c"}), InvalidArgument);
  EXPECT_THROW(Compare({dir / "a", dir / "nope"}), InvalidArgument);
}

TEST(Train, RunsAndEvaluates) {
  oracle::TempDir dir;
  const auto a = oracle::WriteSyntheticA(dir, 40, 9);
  RunConfig cfg = SyntheticConfig(dir, a);
  cfg.method = Method::kMc;
  cfg.eval_data_path = a.data;
  cfg.eval_answers_path = a.answers;
  cfg.training.batch_size = 8;
  cfg.training.learning_rate = 0.05;
  cfg.training.num_train_epochs = 20;
  cfg.training.max_steps = 100;
  cfg.training.warmup_steps = 10;
  const RunRecord rec = RunTrain(cfg);
  EXPECT_EQ(rec.predictions.size(), 40u);
  EXPECT_TRUE(fs::exists(rec.run_dir + "/history.csv"));
  EXPECT_TRUE(fs::exists(rec.run_dir + "/summary.json"));
  const json r = Evaluate(rec.run_dir + "/predictions.csv", a.answers, Subtask::kA);
  EXPECT_EQ(r["accuracy"], rec.metrics["accuracy"]);

  cfg.method = Method::kClassify;
  EXPECT_EQ(RunTrain(cfg).predictions.size(), 40u);
  cfg.method = Method::kMlm;
  EXPECT_THROW(RunTrain(cfg), InvalidArgument);
}

TEST(Sweep, RanksGrid) {
  oracle::TempDir dir;
  const auto a = oracle::WriteSyntheticA(dir, 20, 10);
  RunConfig cfg = SyntheticConfig(dir, a);
  cfg.method = Method::kMc;
  cfg.training.max_steps = 20;
  cfg.training.warmup_steps = 2;
  EXPECT_THROW(RunSweep(cfg, {}), InvalidArgument);  // no eval set
  cfg.eval_data_path = a.data;
  cfg.eval_answers_path = a.answers;
  const RunRecord rec = RunSweep(cfg, {});
  const json sweep = json::parse(oracle::ReadFile(rec.run_dir + "/sweep.json"));
  EXPECT_EQ(sweep.size(), 3u);
}

TEST(DatasetStats, Counts) {
  oracle::TempDir dir;
  const auto a = oracle::WriteSyntheticA(dir, 10, 11);
  const json s = DatasetStats(Subtask::kA, a.data, a.answers);
  EXPECT_EQ(s["examples"], 10);
  EXPECT_EQ(s["labeled"], 10);
  EXPECT_EQ(s["statements"]["count"], 20);
  EXPECT_EQ(s["label_counts"][0].get<int>() + s["label_counts"][1].get<int>(), 10);
}

// Command-line behavior, exercised through the installed binary.
int Cli(const std::string& args) {
  const int status = std::system((std::string(COMVE_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  oracle::TempDir dir;
  const auto a = oracle::WriteSyntheticA(dir, 10, 12);
  const std::string common = " --data " + a.data + " --answers " + a.answers +
                             " --backend count:" + a.corpus + " --out " + (dir / "runs");
  EXPECT_EQ(Cli("validate-a" + common), 0);
  EXPECT_EQ(Cli("validate-a --method mc --normalization length-root --content-only" + common), 0);
  EXPECT_EQ(Cli("validate-a --method bert" + common), 2);
  EXPECT_EQ(Cli("validate-a --data " + (dir / "nope.csv") + " --backend count:" + a.corpus), 2);
  EXPECT_EQ(Cli("validate-a --backend service:http://127.0.0.1:1/ --data " + a.data +
                " --out " + (dir / "runs")),
            1);
  EXPECT_EQ(Cli("--help"), 0);
  EXPECT_EQ(Cli(""), 2);
  EXPECT_EQ(Cli("evaluate --subtask A --predictions " + a.answers + " --gold " + a.answers), 0);
  const auto other = dir.Write("other.csv", "zz,1\n");
  EXPECT_EQ(Cli("evaluate --subtask A --predictions " + other + " --gold " + a.answers), 2);
  EXPECT_EQ(Cli("dataset-stats --subtask A --data " + a.data), 0);
}

TEST(Cli, ConfigFileAndOverrides) {
  oracle::TempDir dir;
  const auto a = oracle::WriteSyntheticA(dir, 10, 13);
  const json config = {{"method", "classify"}, {"data", a.data}, {"answers", a.answers},
                       {"backend", "count:" + a.corpus}, {"out", dir / "from-config"}};
  const auto path = dir.Write("run.json", config.dump());
  EXPECT_EQ(Cli("validate-a --config " + path), 0);
  EXPECT_EQ(CountEntries(dir / "from-config"), 1u);
  EXPECT_EQ(Cli("validate-a --config " + path + " --method mlm --out " + (dir / "flag")), 0);
  ASSERT_EQ(CountEntries(dir / "flag"), 1u);
  const auto run = fs::directory_iterator(dir / "flag")->path();
  const json snap = json::parse(oracle::ReadFile((run / "config.snapshot").string()));
  EXPECT_EQ(snap["method"], "mlm");
}

TEST(Cli, OutputRootFromEnvironment) {
  oracle::TempDir dir;
  const auto c = oracle::WriteSyntheticC(dir, 3, 14);
  const std::string env_root = dir / "env-root";
  ::setenv(kOutputRootEnv, env_root.c_str(), 1);
  EXPECT_EQ(Cli("generate-c --data " + c.data + " --answers " + c.answers), 0);
  ::unsetenv(kOutputRootEnv);
  EXPECT_EQ(CountEntries(env_root), 1u);
}

}  // namespace
}  // namespace comve
