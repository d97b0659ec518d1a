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

#ifndef COMVE_TRAINING_H_
#define COMVE_TRAINING_H_

// Fine-tuning loop with linear warmup / linear decay and AdamW, plus a tiny
// trainable bag-of-tokens model that lets the loop run at desk scale.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "comve/backends.h"
#include "comve/choice.h"
#include "comve/corpus.h"

#include "json.hpp"

namespace comve {

struct TrainingConfig {
  int batch_size = 16;
  double learning_rate = 1e-5;  // peak
  double weight_decay = 0.1;
  double adam_epsilon = 1e-8;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  int num_train_epochs = 5;
  int max_steps = 5336;
  int warmup_steps = 320;
  std::uint64_t seed = 0;
};

void Validate(const TrainingConfig& cfg);

// Peak learning rates searched for subtask A.
std::vector<double> DefaultLearningRateGrid();

// 0 -> peak linearly over warmup_steps, then peak -> 0 linearly at max_steps.
double LrAtStep(long step, const TrainingConfig& cfg);

// One supervised example: the model maps `inputs` to one logit per class.
struct TrainingItem {
  std::vector<TokenSequence> inputs;
  int gold = 0;
};

// Model whose parameters the trainer updates in place.
class Trainable {
 public:
  virtual ~Trainable() = default;
  virtual std::span<double> parameters() = 0;
  virtual std::span<const double> parameters() const = 0;
  virtual std::vector<double> Logits(const TrainingItem& item) const = 0;
  // grad += sum_k dlogits[k] * d logit_k / d params
  virtual void AddGradient(const TrainingItem& item, std::span<const double> dlogits,
                           std::span<double> grad) const = 0;
  virtual std::unique_ptr<Trainable> CloneTrainable() const = 0;
};

// Linear scorer over token counts: score = sum of per-token weights over the
// sequence, markers excluded. Tokens outside the feature vocabulary share the
// weight of the unknown symbol.
class LinearBagScorer : public ChoiceScorer, public Trainable {
 public:
  // Feature vocabulary = unknown symbol + distinct tokens of `texts`.
  LinearBagScorer(const std::vector<std::string>& texts, SpecialTokens specials = {});

  std::span<double> parameters() override { return weights_; }
  std::span<const double> parameters() const override { return weights_; }
  // One logit per input sequence.
  std::vector<double> Logits(const TrainingItem& item) const override;
  void AddGradient(const TrainingItem& item, std::span<const double> dlogits,
                   std::span<double> grad) const override;
  std::unique_ptr<Trainable> CloneTrainable() const override;

  double ScoreTokens(std::span<const std::string> tokens) const;
  const Vocabulary& features() const { return *features_; }

 protected:
  double DoScore(const TokenSequence& seq) const override;

 private:
  std::size_t FeatureId(const std::string& token) const;
  bool IsMarker(const std::string& token) const;

  std::shared_ptr<const Vocabulary> features_;
  std::vector<double> weights_;
};

// Pair classifier with logit_k = LinearBagScorer score of segment k.
class LinearBagPairClassifier : public PairClassifier, public Trainable {
 public:
  explicit LinearBagPairClassifier(LinearBagScorer scorer);

  std::span<double> parameters() override { return scorer_.parameters(); }
  std::span<const double> parameters() const override {
    return static_cast<const Trainable&>(scorer_).parameters();
  }
  // Expects a single concatenated pair sequence as input.
  std::vector<double> Logits(const TrainingItem& item) const override;
  void AddGradient(const TrainingItem& item, std::span<const double> dlogits,
                   std::span<double> grad) const override;
  std::unique_ptr<Trainable> CloneTrainable() const override;

 protected:
  std::array<double, 2> DoClassify(const TokenSequence& seq) const override;

 private:
  TrainingItem SegmentItem(const TokenSequence& seq) const;
  LinearBagScorer scorer_;
};

// Dataset adapters. Unlabeled examples are rejected.
std::vector<TrainingItem> ChoiceTrainingItems(const std::vector<ChoiceSet>& sets);
std::vector<TrainingItem> PairClassificationItems(const std::vector<StatementPair>& pairs,
                                                  const Backend& backend);

struct StepRecord {
  long step = 0;
  double lr = 0.0;
  double loss = 0.0;
};

struct TrainingHistory {
  std::vector<StepRecord> steps;
  double final_loss = 0.0;      // mean loss over the training set after training
  double final_accuracy = 0.0;  // argmax accuracy over the training set
};

// Mean cross-entropy of softmax(logits) against gold over the items.
double MeanLoss(const Trainable& model, const std::vector<TrainingItem>& items);
double ArgmaxAccuracy(const Trainable& model, const std::vector<TrainingItem>& items);

// Shuffled mini-batches, cross-entropy loss, AdamW with decoupled weight
// decay, learning rate LrAtStep(k) on update k. Runs
// min(num_train_epochs * ceil(n / batch_size), max_steps) updates.
TrainingHistory FineTune(Trainable& model, const std::vector<TrainingItem>& items,
                         const TrainingConfig& cfg);

struct SweepResult {
  std::size_t config_index = 0;
  TrainingConfig config;
  double accuracy = 0.0;
  double final_loss = 0.0;
};

// Fine-tunes a fresh copy of `prototype` per config and ranks configs by
// accuracy on `eval`, descending; ties keep grid order.
std::vector<SweepResult> HyperparameterSweep(const std::vector<TrainingConfig>& grid,
                                             const Trainable& prototype,
                                             const std::vector<TrainingItem>& train,
                                             const std::vector<TrainingItem>& eval);

void WriteHistoryCsv(const TrainingHistory& history, const std::string& path);
nlohmann::json ToJson(const TrainingConfig& cfg);
TrainingConfig TrainingConfigFromJson(const nlohmann::json& j, TrainingConfig base = {});

}  // namespace comve

#endif  // COMVE_TRAINING_H_
