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

#ifndef COMVE_PLAUSIBILITY_H_
#define COMVE_PLAUSIBILITY_H_

// Masked-token pseudo-likelihood scoring of statements and the pairwise
// sense/nonsense decision built on it.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "comve/backends.h"
#include "comve/corpus.h"

namespace comve {

inline constexpr double kDefaultProbabilityFloor = 1e-12;
inline constexpr double kPlausibilityTieTolerance = 1e-12;

enum class Normalization { kRaw, kLengthRoot, kPerplexity };

Normalization ParseNormalization(std::string_view s);  // raw, length-root, perplexity
std::string_view NormalizationName(Normalization mode);

// A copy of a wrapped sequence with exactly one position replaced by the
// mask token.
struct MaskedVariant {
  TokenSequence sequence;
  std::size_t masked_position = 0;
  std::string original_token;
};

struct PlausibilityScore {
  double log_prob_sum = 0.0;  // natural log of the probability product
  std::size_t token_count = 0;
  Normalization mode = Normalization::kRaw;
  double value = 0.0;
  bool floored = false;  // some probability was clamped to the floor
};

// One variant per position, left to right. With content_only the begin and
// end markers are not masked.
std::vector<MaskedVariant> EnumerateMaskedVariants(const TokenSequence& seq,
                                                   const SpecialTokens& specials,
                                                   bool content_only);

// Sum over variants of ln P(original token | variant), in raw mode.
// Probabilities below `floor` are clamped to it and flagged.
PlausibilityScore PseudoLogLikelihood(const TokenSequence& seq, const MaskedLM& backend,
                                      bool content_only,
                                      double floor = kDefaultProbabilityFloor);

// raw: ln P; length_root: P^(1/N); perplexity: P^(-1/N).
PlausibilityScore ApplyNormalization(const PlausibilityScore& score, Normalization mode);

// True when `a` is strictly more plausible than `b` under their shared mode
// (higher value, except lower for perplexity).
bool MorePlausible(const PlausibilityScore& a, const PlausibilityScore& b);

// Period-normalizes, tokenizes with the backend tokenizer and wraps.
TokenSequence PrepareStatement(std::string_view text, const Backend& backend);

struct PlausibilityOptions {
  Normalization mode = Normalization::kRaw;
  bool content_only = false;
  double floor = kDefaultProbabilityFloor;
};

struct PlausibleChoice {
  int index = 0;  // the more sensible statement
  bool tie = false;
  std::array<PlausibilityScore, 2> scores;
};

PlausibilityScore ScoreStatement(std::string_view text, const MaskedLM& backend,
                                 const PlausibilityOptions& options);

// Picks the more plausible statement of the pair; values within 1e-12 are a
// tie resolved to index 0.
PlausibleChoice ChoosePlausible(const StatementPair& pair, const MaskedLM& backend,
                                const PlausibilityOptions& options = {});
PlausibleChoice DecidePlausible(const std::array<PlausibilityScore, 2>& scores);

// Index of the statement that does not make sense.
int PredictNonsense(const StatementPair& pair, const MaskedLM& backend,
                    const PlausibilityOptions& options = {});

// Choice scorer whose score is the (normalized) pseudo-log-likelihood of the
// candidate. Perplexity is negated so that higher stays better.
class PllChoiceScorer : public ChoiceScorer {
 public:
  PllChoiceScorer(const MaskedLM& backend, PlausibilityOptions options = {})
      : ChoiceScorer(backend.specials()), backend_(backend), options_(options) {}

  std::vector<std::string> Tokenize(std::string_view text) const override {
    return backend_.Tokenize(text);
  }
  bool concurrent_safe() const override { return backend_.concurrent_safe(); }

 protected:
  double DoScore(const TokenSequence& seq) const override;

 private:
  const MaskedLM& backend_;
  PlausibilityOptions options_;
};

}  // namespace comve

#endif  // COMVE_PLAUSIBILITY_H_
