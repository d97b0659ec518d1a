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

#include "comve/training.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "comve/error.h"
#include <exception>

namespace comve {

void Validate(const TrainingConfig& cfg) {
  if (cfg.batch_size < 1) throw InvalidArgument("batch_size must be at least 1");
  if (!(cfg.learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
  if (cfg.warmup_steps <= 0 || cfg.warmup_steps >= cfg.max_steps) {
    throw InvalidArgument("need 0 < warmup_steps < max_steps");
  }
  if (cfg.num_train_epochs < 1) throw InvalidArgument("num_train_epochs must be at least 1");
  if (cfg.weight_decay < 0.0) throw InvalidArgument("weight_decay must be non-negative");
  if (!(cfg.adam_epsilon > 0.0)) throw InvalidArgument("adam_epsilon must be positive");
  if (cfg.adam_beta1 < 0.0 || cfg.adam_beta1 >= 1.0 || cfg.adam_beta2 < 0.0 ||
      cfg.adam_beta2 >= 1.0) {
    throw InvalidArgument("adam betas must lie in [0, 1)");
  }
}

std::vector<double> DefaultLearningRateGrid() { return {1e-5, 2e-5, 3e-5}; }

double LrAtStep(long step, const TrainingConfig& cfg) {
  if (step < 0 || step > cfg.max_steps) {
    throw InvalidArgument("step " + std::to_string(step) + " outside [0, max_steps]");
  }
  if (step <= cfg.warmup_steps) {
    return cfg.learning_rate *
           (static_cast<double>(step) / static_cast<double>(cfg.warmup_steps));
  }
  return cfg.learning_rate * (static_cast<double>(cfg.max_steps - step) /
                              static_cast<double>(cfg.max_steps - cfg.warmup_steps));
}

// --- LinearBagScorer -------------------------------------------------------

namespace {

std::shared_ptr<const Vocabulary> FeatureVocabulary(const std::vector<std::string>& texts,
                                                    const SpecialTokens& sp) {
  std::set<std::string> seen;
  for (const std::string& text : texts) {
    for (std::string& tok : TokenizeReference(text)) seen.insert(std::move(tok));
  }
  seen.erase(sp.unknown);
  std::vector<std::string> tokens{sp.unknown};
  tokens.insert(tokens.end(), seen.begin(), seen.end());
  return std::make_shared<const Vocabulary>(std::move(tokens));
}

std::vector<double> Softmax(const std::vector<double>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

double CrossEntropy(const std::vector<double>& logits, int gold) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double l : logits) total += std::exp(l - mx);
  return -(logits[static_cast<std::size_t>(gold)] - mx - std::log(total));
}

}  // namespace

LinearBagScorer::LinearBagScorer(const std::vector<std::string>& texts, SpecialTokens specials)
    : ChoiceScorer(std::move(specials)),
      features_(FeatureVocabulary(texts, this->specials())),
      weights_(features_->size(), 0.0) {}

bool LinearBagScorer::IsMarker(const std::string& token) const {
  const SpecialTokens& sp = specials();
  return token == sp.begin || token == sp.end || token == sp.mask;
}

std::size_t LinearBagScorer::FeatureId(const std::string& token) const {
  return features_->Find(token).value_or(0);
}

double LinearBagScorer::ScoreTokens(std::span<const std::string> tokens) const {
  double s = 0.0;
  for (const std::string& t : tokens) {
    if (!IsMarker(t)) s += weights_[FeatureId(t)];
  }
  return s;
}

double LinearBagScorer::DoScore(const TokenSequence& seq) const {
  return ScoreTokens(seq.tokens);
}

std::vector<double> LinearBagScorer::Logits(const TrainingItem& item) const {
  std::vector<double> logits;
  logits.reserve(item.inputs.size());
  for (const TokenSequence& seq : item.inputs) logits.push_back(ScoreTokens(seq.tokens));
  return logits;
}

void LinearBagScorer::AddGradient(const TrainingItem& item, std::span<const double> dlogits,
                                  std::span<double> grad) const {
  for (std::size_t k = 0; k < item.inputs.size(); ++k) {
    for (const std::string& t : item.inputs[k].tokens) {
      if (!IsMarker(t)) grad[FeatureId(t)] += dlogits[k];
    }
  }
}

std::unique_ptr<Trainable> LinearBagScorer::CloneTrainable() const {
  return std::make_unique<LinearBagScorer>(*this);
}

// --- LinearBagPairClassifier -----------------------------------------------

LinearBagPairClassifier::LinearBagPairClassifier(LinearBagScorer scorer)
    : PairClassifier(scorer.specials()), scorer_(std::move(scorer)) {}

TrainingItem LinearBagPairClassifier::SegmentItem(const TokenSequence& seq) const {
  auto [first, second] = SplitPairSegments(seq, specials());
  TrainingItem item;
  item.inputs = {WrapSpecial(std::move(first), specials()),
                 WrapSpecial(std::move(second), specials())};
  return item;
}

std::vector<double> LinearBagPairClassifier::Logits(const TrainingItem& item) const {
  if (item.inputs.size() != 1) throw InvalidArgument("pair classifier expects one input");
  return scorer_.Logits(SegmentItem(item.inputs.front()));
}

void LinearBagPairClassifier::AddGradient(const TrainingItem& item,
                                          std::span<const double> dlogits,
                                          std::span<double> grad) const {
  scorer_.AddGradient(SegmentItem(item.inputs.front()), dlogits, grad);
}

std::unique_ptr<Trainable> LinearBagPairClassifier::CloneTrainable() const {
  return std::make_unique<LinearBagPairClassifier>(*this);
}

std::array<double, 2> LinearBagPairClassifier::DoClassify(const TokenSequence& seq) const {
  const std::vector<double> p = Softmax(scorer_.Logits(SegmentItem(seq)));
  return {p[0], p[1]};
}

// --- datasets ----------------------------------------------------------------

std::vector<TrainingItem> ChoiceTrainingItems(const std::vector<ChoiceSet>& sets) {
  std::vector<TrainingItem> items;
  items.reserve(sets.size());
  for (const ChoiceSet& set : sets) {
    Validate(set);
    if (!set.gold_index) throw InvalidArgument("item '" + set.item_id + "' has no gold label");
    items.push_back({set.candidate_sequences, *set.gold_index});
  }
  return items;
}

std::vector<TrainingItem> PairClassificationItems(const std::vector<StatementPair>& pairs,
                                                  const Backend& backend) {
  std::vector<TrainingItem> items;
  items.reserve(pairs.size());
  for (const StatementPair& pair : pairs) {
    if (!pair.nonsense_index) throw InvalidArgument("pair '" + pair.id + "' has no gold label");
    items.push_back({{ConcatPair(pair, backend)}, *pair.nonsense_index});
  }
  return items;
}

// --- training loop -----------------------------------------------------------

double MeanLoss(const Trainable& model, const std::vector<TrainingItem>& items) {
  if (items.empty()) throw InvalidArgument("loss over an empty dataset");
  double total = 0.0;
  for (const TrainingItem& item : items) total += CrossEntropy(model.Logits(item), item.gold);
  return total / static_cast<double>(items.size());
}

double ArgmaxAccuracy(const Trainable& model, const std::vector<TrainingItem>& items) {
  if (items.empty()) throw InvalidArgument("accuracy over an empty dataset");
  std::size_t correct = 0;
  for (const TrainingItem& item : items) {
    correct += DecideChoice(model.Logits(item)).index == item.gold;
  }
  return static_cast<double>(correct) / static_cast<double>(items.size());
}

TrainingHistory FineTune(Trainable& model, const std::vector<TrainingItem>& items,
                         const TrainingConfig& cfg) {
  Validate(cfg);
  if (items.empty()) throw InvalidArgument("fine-tuning needs a non-empty dataset");
  for (const TrainingItem& item : items) {
    if (item.inputs.empty()) throw InvalidArgument("training item without inputs");
  }

  const std::size_t n = items.size();
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  const long steps_per_epoch = static_cast<long>((n + batch - 1) / batch);
  const long total_steps =
      std::min<long>(cfg.num_train_epochs * steps_per_epoch, static_cast<long>(cfg.max_steps));

  std::span<double> params = model.parameters();
  std::vector<double> grad(params.size()), m(params.size(), 0.0), v(params.size(), 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);

  TrainingHistory history;
  history.steps.reserve(static_cast<std::size_t>(total_steps));
  long step = 0;
  while (step < total_steps) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n && step < total_steps; start += batch, ++step) {
      const std::size_t end = std::min(n, start + batch);
      const double scale = 1.0 / static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      double loss = 0.0;
      for (std::size_t b = start; b < end; ++b) {
        const TrainingItem& item = items[order[b]];
        const std::vector<double> logits = model.Logits(item);
        loss += CrossEntropy(logits, item.gold);
        std::vector<double> dlogits = Softmax(logits);
        dlogits[static_cast<std::size_t>(item.gold)] -= 1.0;
        for (double& d : dlogits) d *= scale;
        model.AddGradient(item, dlogits, grad);
      }
      loss *= scale;
      if (!std::isfinite(loss)) {
        throw Error("non-finite training loss at step " + std::to_string(step));
      }

      const double lr = LrAtStep(step, cfg);
      const double t = static_cast<double>(step + 1);
      const double c1 = 1.0 - std::pow(cfg.adam_beta1, t);
      const double c2 = 1.0 - std::pow(cfg.adam_beta2, t);
      for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] -= lr * cfg.weight_decay * params[i];
        m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * grad[i];
        v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
        params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.adam_epsilon);
      }
      history.steps.push_back({step, lr, loss});
    }
  }
  history.final_loss = MeanLoss(model, items);
  history.final_accuracy = ArgmaxAccuracy(model, items);
  return history;
}

std::vector<SweepResult> HyperparameterSweep(const std::vector<TrainingConfig>& grid,
                                             const Trainable& prototype,
                                             const std::vector<TrainingItem>& train,
                                             const std::vector<TrainingItem>& eval) {
  if (grid.empty()) throw InvalidArgument("empty hyperparameter grid");
  if (eval.empty()) throw InvalidArgument("sweep needs an evaluation set");
  for (const TrainingConfig& cfg : grid) Validate(cfg);

  std::vector<SweepResult> results(grid.size());
  std::vector<std::exception_ptr> failures(grid.size());
  const auto count = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      std::unique_ptr<Trainable> model = prototype.CloneTrainable();
      const TrainingHistory history = FineTune(*model, train, grid[k]);
      results[k] = {k, grid[k], ArgmaxAccuracy(*model, eval), history.final_loss};
    } catch (...) {
      failures[k] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  std::stable_sort(results.begin(), results.end(),
                   [](const SweepResult& a, const SweepResult& b) { return a.accuracy > b.accuracy; });
  return results;
}

void WriteHistoryCsv(const TrainingHistory& history, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.precision(17);
  out << "step,lr,loss\n";
  for (const StepRecord& r : history.steps) out << r.step << ',' << r.lr << ',' << r.loss << '\n';
}

nlohmann::json ToJson(const TrainingConfig& cfg) {
  return {{"batch_size", cfg.batch_size},     {"learning_rate", cfg.learning_rate},
          {"weight_decay", cfg.weight_decay}, {"adam_epsilon", cfg.adam_epsilon},
          {"adam_beta1", cfg.adam_beta1},     {"adam_beta2", cfg.adam_beta2},
          {"num_train_epochs", cfg.num_train_epochs},
          {"max_steps", cfg.max_steps},       {"warmup_steps", cfg.warmup_steps},
          {"seed", cfg.seed}};
}

TrainingConfig TrainingConfigFromJson(const nlohmann::json& j, TrainingConfig cfg) {
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
  cfg.adam_epsilon = j.value("adam_epsilon", cfg.adam_epsilon);
  cfg.adam_beta1 = j.value("adam_beta1", cfg.adam_beta1);
  cfg.adam_beta2 = j.value("adam_beta2", cfg.adam_beta2);
  cfg.num_train_epochs = j.value("num_train_epochs", cfg.num_train_epochs);
  cfg.max_steps = j.value("max_steps", cfg.max_steps);
  cfg.warmup_steps = j.value("warmup_steps", cfg.warmup_steps);
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

}  // namespace comve
