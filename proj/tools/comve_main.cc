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

// comve: command-line front end for the commonsense validation and
// explanation toolkit.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "comve/error.h"
#include "comve/runner.h"

namespace {

using comve::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitUsage = 2;

// Flags shared by the run commands. Each is applied only when given on the
// command line, so it overrides the corresponding config file value.
struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string backend;
  std::string subtask;
  std::string method;
  std::string normalization;
  std::string data;
  std::string answers;
  std::string eval_data;
  std::string eval_answers;
  double alpha = 1.0;
  int max_new_tokens = 0;
  std::string strategy;
  double temperature = 1.0;
  int top_k = 0;
  int epochs = 0;
  int batch_size = 0;
  int max_steps = 0;
  int warmup_steps = 0;
  double lr = 0.0;
  double weight_decay = 0.0;
  std::vector<double> lrs;

  std::vector<CLI::Option*> opts;
};

CLI::Option* Find(const Flags& f, const std::string& name) {
  for (CLI::Option* o : f.opts) {
    if (o->check_lname(name)) return o;
  }
  return nullptr;
}

bool Given(const Flags& f, const std::string& name) {
  const CLI::Option* o = Find(f, name);
  return o != nullptr && o->count() > 0;
}

void AddCommon(CLI::App* cmd, Flags& f) {
  f.opts.push_back(cmd->add_option("--config", f.config, "JSON run configuration"));
  f.opts.push_back(cmd->add_option("--seed", f.seed, "random seed"));
  f.opts.push_back(cmd->add_option("--out", f.out, "output root (default $COMVE_OUT or ./runs)"));
  f.opts.push_back(cmd->add_option("--backend", f.backend, "count:CORPUS or service:URL"));
  f.opts.push_back(cmd->add_option("--data", f.data, "dataset CSV"));
  f.opts.push_back(cmd->add_option("--answers", f.answers, "gold answers CSV"));
  f.opts.push_back(cmd->add_option("--alpha", f.alpha, "count backend smoothing"));
}

void AddScoring(CLI::App* cmd, Flags& f, bool with_method) {
  if (with_method) {
    f.opts.push_back(cmd->add_option("--method", f.method, "mlm, classify or mc")
                         ->check(CLI::IsMember({"mlm", "classify", "mc"})));
  }
  f.opts.push_back(cmd->add_option("--normalization", f.normalization,
                                   "raw, length-root or perplexity")
                       ->check(CLI::IsMember({"raw", "length-root", "perplexity"})));
  f.opts.push_back(cmd->add_flag("--content-only", "mask content tokens only"));
}

void AddSeparator(CLI::App* cmd, Flags& f) {
  f.opts.push_back(cmd->add_flag("--separator", "insert a separator between statement and option"));
}

void AddDecode(CLI::App* cmd, Flags& f) {
  f.opts.push_back(cmd->add_option("--method", f.method, "identity or lm")
                       ->check(CLI::IsMember({"identity", "lm"})));
  f.opts.push_back(cmd->add_option("--max-new-tokens", f.max_new_tokens));
  f.opts.push_back(cmd->add_option("--strategy", f.strategy)->check(CLI::IsMember({"greedy", "sample"})));
  f.opts.push_back(cmd->add_option("--temperature", f.temperature));
  f.opts.push_back(cmd->add_option("--top-k", f.top_k));
}

void AddTraining(CLI::App* cmd, Flags& f) {
  f.opts.push_back(cmd->add_option("--subtask", f.subtask, "A or B")->check(CLI::IsMember({"A", "B"})));
  f.opts.push_back(cmd->add_option("--method", f.method, "classify or mc (subtask A)")
                       ->check(CLI::IsMember({"classify", "mc"})));
  f.opts.push_back(cmd->add_option("--eval-data", f.eval_data));
  f.opts.push_back(cmd->add_option("--eval-answers", f.eval_answers));
  f.opts.push_back(cmd->add_option("--epochs", f.epochs));
  f.opts.push_back(cmd->add_option("--batch-size", f.batch_size));
  f.opts.push_back(cmd->add_option("--max-steps", f.max_steps));
  f.opts.push_back(cmd->add_option("--warmup-steps", f.warmup_steps));
  f.opts.push_back(cmd->add_option("--weight-decay", f.weight_decay));
  AddSeparator(cmd, f);
}

RunConfig Resolve(const Flags& f) {
  RunConfig cfg;
  if (const char* env = std::getenv(comve::kOutputRootEnv); env != nullptr && *env != '\0') {
    cfg.out_root = env;
  }
  if (!f.config.empty()) cfg = comve::LoadRunConfig(f.config, cfg);
  if (Given(f, "seed")) cfg.seed = f.seed;
  if (Given(f, "out")) cfg.out_root = f.out;
  if (Given(f, "backend")) cfg.backend = comve::ParseBackendSpec(f.backend);
  if (Given(f, "data")) cfg.data_path = f.data;
  if (Given(f, "answers")) cfg.answers_path = f.answers;
  if (Given(f, "alpha")) cfg.alpha = f.alpha;
  if (Given(f, "subtask")) cfg.subtask = comve::ParseSubtask(f.subtask);
  if (Given(f, "method")) cfg.method = comve::ParseMethod(f.method);
  if (Given(f, "normalization")) cfg.normalization = comve::ParseNormalization(f.normalization);
  if (Given(f, "content-only")) cfg.content_only = true;
  if (Given(f, "separator")) cfg.insert_separator = true;
  if (Given(f, "eval-data")) cfg.eval_data_path = f.eval_data;
  if (Given(f, "eval-answers")) cfg.eval_answers_path = f.eval_answers;
  if (Given(f, "max-new-tokens")) cfg.decode.max_new_tokens = f.max_new_tokens;
  if (Given(f, "strategy")) {
    cfg.decode.strategy =
        f.strategy == "greedy" ? comve::DecodeStrategy::kGreedy : comve::DecodeStrategy::kSample;
  }
  if (Given(f, "temperature")) cfg.decode.temperature = f.temperature;
  if (Given(f, "top-k")) cfg.decode.top_k = f.top_k;
  if (Given(f, "epochs")) cfg.training.num_train_epochs = f.epochs;
  if (Given(f, "batch-size")) cfg.training.batch_size = f.batch_size;
  if (Given(f, "max-steps")) cfg.training.max_steps = f.max_steps;
  if (Given(f, "warmup-steps")) cfg.training.warmup_steps = f.warmup_steps;
  if (Given(f, "lr")) cfg.training.learning_rate = f.lr;
  if (Given(f, "weight-decay")) cfg.training.weight_decay = f.weight_decay;
  return cfg;
}

int Report(const comve::RunRecord& rec) {
  std::cout << rec.run_dir << "\n" << rec.metrics.dump(2) << "\n";
  if (rec.failures > 0) {
    std::cerr << rec.failures << " example(s) failed; see " << rec.run_dir << "/log.txt\n";
  }
  return rec.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Commonsense validation, explanation selection and reason generation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", comve::kToolkitVersion);

  Flags a, b, c, tr, sw;

  CLI::App* validate = app.add_subcommand("validate-a", "pick the nonsensical statement of each pair");
  AddCommon(validate, a);
  AddScoring(validate, a, true);

  CLI::App* explain = app.add_subcommand("explain-b", "select the reason a statement is against sense");
  AddCommon(explain, b);
  AddScoring(explain, b, false);
  AddSeparator(explain, b);

  CLI::App* generate = app.add_subcommand("generate-c", "generate a reason for each statement");
  AddCommon(generate, c);
  AddDecode(generate, c);

  CLI::App* train = app.add_subcommand("train", "fine-tune the reference scorer");
  AddCommon(train, tr);
  AddTraining(train, tr);
  tr.opts.push_back(train->add_option("--lr", tr.lr, "peak learning rate"));

  CLI::App* sweep = app.add_subcommand("sweep", "learning-rate sweep on a held-out set");
  AddCommon(sweep, sw);
  AddTraining(sweep, sw);
  sweep->add_option("--lrs", sw.lrs, "peak learning rates (default 1e-5 2e-5 3e-5)");

  std::string pred_path, gold_path, eval_subtask, eval_output;
  CLI::App* evaluate = app.add_subcommand("evaluate", "score a predictions file against gold answers");
  evaluate->add_option("--predictions", pred_path)->required();
  evaluate->add_option("--gold", gold_path)->required();
  evaluate->add_option("--subtask", eval_subtask)->required()->check(CLI::IsMember({"A", "B", "C"}));
  evaluate->add_option("--output", eval_output, "also write the report to this JSON file");

  std::vector<std::string> compare_dirs;
  bool compare_json = false;
  CLI::App* compare = app.add_subcommand("compare", "rank runs by their metric");
  compare->add_option("runs", compare_dirs, "run directories")->required();
  compare->add_flag("--json", compare_json, "print JSON instead of a table");

  std::string stats_subtask, stats_data, stats_answers;
  CLI::App* stats = app.add_subcommand("dataset-stats", "summarize a dataset");
  stats->add_option("--subtask", stats_subtask)->required()->check(CLI::IsMember({"A", "B", "C"}));
  stats->add_option("--data", stats_data)->required();
  stats->add_option("--answers", stats_answers);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed()) {
      RunConfig cfg = Resolve(a);
      cfg.subtask = comve::Subtask::kA;
      return Report(comve::Run(cfg));
    }
    if (explain->parsed()) {
      RunConfig cfg = Resolve(b);
      cfg.subtask = comve::Subtask::kB;
      cfg.method = comve::Method::kMc;
      return Report(comve::Run(cfg));
    }
    if (generate->parsed()) {
      RunConfig cfg = Resolve(c);
      cfg.subtask = comve::Subtask::kC;
      if (!comve::MethodValidFor(cfg.subtask, cfg.method)) cfg.method = comve::Method::kIdentity;
      return Report(comve::Run(cfg));
    }
    if (train->parsed() || sweep->parsed()) {
      const Flags& f = train->parsed() ? tr : sw;
      RunConfig cfg = Resolve(f);
      if (cfg.subtask == comve::Subtask::kB || !Given(f, "method")) {
        if (cfg.method != comve::Method::kClassify || cfg.subtask == comve::Subtask::kB) {
          cfg.method = comve::Method::kMc;
        }
      }
      return Report(train->parsed() ? comve::RunTrain(cfg) : comve::RunSweep(cfg, sw.lrs));
    }
    if (evaluate->parsed()) {
      const nlohmann::json report =
          comve::Evaluate(pred_path, gold_path, comve::ParseSubtask(eval_subtask));
      std::cout << report.dump(2) << "\n";
      if (!eval_output.empty()) {
        std::ofstream out(eval_output);
        if (!out) throw comve::Error("cannot write " + eval_output);
        out << report.dump(2) << "\n";
      }
      return kExitOk;
    }
    if (compare->parsed()) {
      const auto rows = comve::Compare(compare_dirs);
      if (compare_json) {
        std::cout << comve::ToJson(rows).dump(2) << "\n";
      } else {
        std::cout << comve::RenderComparison(rows);
      }
      return kExitOk;
    }
    if (stats->parsed()) {
      std::optional<std::string> answers;
      if (!stats_answers.empty()) answers = stats_answers;
      std::cout << comve::DatasetStats(comve::ParseSubtask(stats_subtask), stats_data, answers).dump(2)
                << "\n";
      return kExitOk;
    }
  } catch (const comve::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const comve::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitUsage;
}
