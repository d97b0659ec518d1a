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

#ifndef COMVE_BACKENDS_H_
#define COMVE_BACKENDS_H_

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "comve/corpus.h"

namespace comve {

// Tolerance on the total mass of any distribution a backend returns.
inline constexpr double kDistributionTolerance = 1e-9;

// Ordered set of token strings with constant-time lookup.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t id) const { return tokens_[id]; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<std::size_t> Find(std::string_view token) const;
  bool Contains(std::string_view token) const { return Find(token).has_value(); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Probability distribution over a vocabulary. Construction validates that
// every entry is finite and non-negative and that the total is 1 within
// kDistributionTolerance. Lookups of tokens outside the vocabulary resolve
// to the fallback symbol when one is set (unknown or catch-all), else 0.
class VocabDistribution {
 public:
  VocabDistribution(std::shared_ptr<const Vocabulary> vocab, std::vector<double> probs,
                    std::optional<std::string> fallback = std::nullopt);

  std::size_t size() const { return probs_.size(); }
  const std::string& token(std::size_t id) const { return vocab_->token(id); }
  double prob(std::size_t id) const { return probs_[id]; }
  std::span<const double> probabilities() const { return probs_; }
  const Vocabulary& vocabulary() const { return *vocab_; }
  const std::optional<std::string>& fallback() const { return fallback_; }

  double Probability(std::string_view token) const;
  // Lowest id among the maxima.
  std::size_t ArgMax() const;

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<double> probs_;
  std::optional<std::string> fallback_;
};

// Shared surface of every model backend.
class Backend {
 public:
  explicit Backend(SpecialTokens specials = {}) : specials_(std::move(specials)) {}
  virtual ~Backend() = default;

  const SpecialTokens& specials() const { return specials_; }

  // Backends with their own subword vocabulary override this.
  virtual std::vector<std::string> Tokenize(std::string_view text) const {
    return TokenizeReference(text);
  }

  // False when inference calls must not overlap; batch kernels then run the
  // backend serially.
  virtual bool concurrent_safe() const { return true; }

 private:
  SpecialTokens specials_;
};

// Masked language model: probability of each vocabulary entry at one masked
// position.
class MaskedLM : public Backend {
 public:
  using Backend::Backend;

  // Requires a wrapped sequence whose token at `position` is the mask token.
  VocabDistribution PredictMasked(const TokenSequence& seq, std::size_t position) const;

  // Null for open-vocabulary (remote) backends.
  virtual const Vocabulary* vocabulary() const { return nullptr; }

 protected:
  virtual VocabDistribution DoPredictMasked(const TokenSequence& seq,
                                            std::size_t position) const = 0;
};

// Binary classifier over a concatenated pair [begin, s0, sep, s1, sep]; class
// k means "statement k is nonsense".
class PairClassifier : public Backend {
 public:
  using Backend::Backend;

  std::array<double, 2> Classify(const TokenSequence& seq) const;

 protected:
  virtual std::array<double, 2> DoClassify(const TokenSequence& seq) const = 0;
};

// Scores one wrapped candidate; higher is more plausible.
class ChoiceScorer : public Backend {
 public:
  using Backend::Backend;

  double Score(const TokenSequence& seq) const;

 protected:
  virtual double DoScore(const TokenSequence& seq) const = 0;
};

// Autoregressive next-token model.
class Generator : public Backend {
 public:
  using Backend::Backend;

  // An empty prefix means "start of text".
  VocabDistribution NextToken(const std::vector<std::string>& prefix) const;
  virtual const std::string& end_of_text() const = 0;

 protected:
  virtual VocabDistribution DoNextToken(const std::vector<std::string>& prefix) const = 0;
};

// Splits [begin, s0..., sep, s1..., sep] into its two segments. The end
// marker doubles as separator. Throws InvalidArgument when malformed.
std::pair<std::vector<std::string>, std::vector<std::string>> SplitPairSegments(
    const TokenSequence& seq, const SpecialTokens& specials);

}  // namespace comve

#endif  // COMVE_BACKENDS_H_
