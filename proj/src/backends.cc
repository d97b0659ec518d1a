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

#include "comve/backends.h"

#include <cmath>

#include "comve/error.h"

namespace comve {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw InvalidArgument("duplicate vocabulary entry '" + tokens_[i] + "'");
    }
  }
}

std::optional<std::size_t> Vocabulary::Find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VocabDistribution::VocabDistribution(std::shared_ptr<const Vocabulary> vocab,
                                     std::vector<double> probs,
                                     std::optional<std::string> fallback)
    : vocab_(std::move(vocab)), probs_(std::move(probs)), fallback_(std::move(fallback)) {
  if (!vocab_ || vocab_->size() != probs_.size() || probs_.empty()) {
    throw InvalidArgument("distribution size does not match its vocabulary");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw InvalidArgument("invalid probability in distribution");
    total += p;
  }
  if (std::abs(total - 1.0) > kDistributionTolerance) {
    throw InvalidArgument("distribution sums to " + std::to_string(total));
  }
  if (fallback_ && !vocab_->Contains(*fallback_)) {
    throw InvalidArgument("fallback symbol '" + *fallback_ + "' not in vocabulary");
  }
}

double VocabDistribution::Probability(std::string_view token) const {
  if (auto id = vocab_->Find(token)) return probs_[*id];
  if (fallback_) return probs_[*vocab_->Find(*fallback_)];
  return 0.0;
}

std::size_t VocabDistribution::ArgMax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs_.size(); ++i) {
    if (probs_[i] > probs_[best]) best = i;
  }
  return best;
}

VocabDistribution MaskedLM::PredictMasked(const TokenSequence& seq, std::size_t position) const {
  if (!seq.has_specials) throw InvalidArgument("masked prediction needs a wrapped sequence");
  if (position >= seq.size()) throw InvalidArgument("mask position out of range");
  if (seq[position] != specials().mask) {
    throw InvalidArgument("position " + std::to_string(position) + " does not hold the mask token");
  }
  return DoPredictMasked(seq, position);
}

std::pair<std::vector<std::string>, std::vector<std::string>> SplitPairSegments(
    const TokenSequence& seq, const SpecialTokens& specials) {
  if (!seq.has_specials || seq.size() < 5 || seq.tokens.front() != specials.begin ||
      seq.tokens.back() != specials.end) {
    throw InvalidArgument("not a concatenated pair sequence");
  }
  std::size_t separators = 0;
  std::size_t middle = 0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i] == specials.end) {
      ++separators;
      if (separators == 1) middle = i;
    }
  }
  if (separators != 2) {
    throw InvalidArgument("pair sequence needs exactly two separators, found " +
                          std::to_string(separators));
  }
  std::vector<std::string> first(seq.tokens.begin() + 1, seq.tokens.begin() + middle);
  std::vector<std::string> second(seq.tokens.begin() + middle + 1, seq.tokens.end() - 1);
  if (first.empty() || second.empty()) throw InvalidArgument("empty segment in pair sequence");
  return {std::move(first), std::move(second)};
}

std::array<double, 2> PairClassifier::Classify(const TokenSequence& seq) const {
  SplitPairSegments(seq, specials());
  std::array<double, 2> probs = DoClassify(seq);
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) throw Error("classifier returned an invalid probability");
  }
  if (std::abs(probs[0] + probs[1] - 1.0) > kDistributionTolerance) {
    throw Error("classifier distribution does not sum to 1");
  }
  return probs;
}

double ChoiceScorer::Score(const TokenSequence& seq) const {
  if (!seq.has_specials) throw InvalidArgument("choice scoring needs a wrapped sequence");
  if (seq.size() < 3) throw InvalidArgument("candidate has no interior tokens");
  const double score = DoScore(seq);
  if (!std::isfinite(score)) throw Error("scorer returned a non-finite score");
  return score;
}

VocabDistribution Generator::NextToken(const std::vector<std::string>& prefix) const {
  return DoNextToken(prefix);
}

}  // namespace comve
