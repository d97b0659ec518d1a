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

#ifndef COMVE_COUNT_BACKENDS_H_
#define COMVE_COUNT_BACKENDS_H_

// Deterministic count-based reference backends. They exercise the same code
// paths a neural backend would, with probabilities small enough to check by
// hand.

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "comve/backends.h"

namespace comve {

// Add-alpha smoothed unigram model used as a masked LM. The prediction does
// not depend on the masked position or the surrounding tokens.
//
// Vocabulary layout: begin, end, mask and unknown symbols first, then the
// distinct content tokens in byte order. Content tokens weigh count + alpha;
// the reserved symbols weigh their raw count (zero unless they occur in the
// training text). Unseen words resolve to the unknown symbol.
class UnigramMaskedLM : public MaskedLM {
 public:
  UnigramMaskedLM(const std::vector<std::string>& corpus, double alpha,
                  SpecialTokens specials = {});

  const Vocabulary* vocabulary() const override { return vocab_.get(); }
  double alpha() const { return alpha_; }
  std::size_t content_size() const { return content_size_; }
  std::size_t total_count() const { return total_count_; }
  // Raw training count of a token (0 when unseen).
  std::size_t count(const std::string& token) const;
  const VocabDistribution& distribution() const { return *distribution_; }

 protected:
  VocabDistribution DoPredictMasked(const TokenSequence& seq, std::size_t position) const override;

 private:
  double alpha_;
  std::shared_ptr<const Vocabulary> vocab_;
  std::unordered_map<std::string, std::size_t> counts_;
  std::size_t content_size_ = 0;
  std::size_t total_count_ = 0;
  std::optional<VocabDistribution> distribution_;
};

// Trains the unigram reference backend; throws InvalidArgument on an empty
// corpus or alpha <= 0.
std::unique_ptr<UnigramMaskedLM> TrainCountBackend(const std::vector<std::string>& corpus,
                                                   double alpha, SpecialTokens specials = {});

// Uniform distribution over a fixed vocabulary. Test double.
class UniformMaskedLM : public MaskedLM {
 public:
  explicit UniformMaskedLM(std::vector<std::string> vocabulary, SpecialTokens specials = {});
  const Vocabulary* vocabulary() const override { return vocab_.get(); }

 protected:
  VocabDistribution DoPredictMasked(const TokenSequence& seq, std::size_t position) const override;

 private:
  std::shared_ptr<const Vocabulary> vocab_;
};

// Pair classifier that counts tokens outside a known vocabulary in each
// segment; P(segment k is nonsense) = (u_k + 1) / (u_0 + u_1 + 2).
class UnknownCountClassifier : public PairClassifier {
 public:
  UnknownCountClassifier(const std::vector<std::string>& corpus, SpecialTokens specials = {});
  explicit UnknownCountClassifier(Vocabulary known, SpecialTokens specials = {});

  std::size_t CountUnknown(const std::vector<std::string>& tokens) const;

 protected:
  std::array<double, 2> DoClassify(const TokenSequence& seq) const override;

 private:
  Vocabulary known_;
};

// Add-alpha smoothed bigram generator:
//   P(w | h) = (c(h, w) + alpha) / (c(h) + alpha * |V|)
// with V = {end-of-text} plus the distinct content tokens. Each training text
// is read as <s> tokens </s>. Histories outside the training vocabulary map
// to the unknown symbol, whose count is zero, giving the uniform distribution.
class BigramGenerator : public Generator {
 public:
  BigramGenerator(const std::vector<std::string>& corpus, double alpha,
                  SpecialTokens specials = {});

  const std::string& end_of_text() const override { return end_of_text_; }
  const std::string& begin_of_text() const { return begin_of_text_; }
  const Vocabulary& output_vocabulary() const { return *vocab_; }
  double alpha() const { return alpha_; }
  std::size_t BigramCount(const std::string& history, const std::string& next) const;
  std::size_t HistoryCount(const std::string& history) const;

 protected:
  VocabDistribution DoNextToken(const std::vector<std::string>& prefix) const override;

 private:
  std::string HistoryKey(const std::vector<std::string>& prefix) const;

  double alpha_;
  std::string begin_of_text_ = "<s>";
  std::string end_of_text_ = "</s>";
  std::shared_ptr<const Vocabulary> vocab_;
  std::unordered_map<std::string, std::unordered_map<std::size_t, std::size_t>> bigrams_;
  std::unordered_map<std::string, std::size_t> history_totals_;
};

}  // namespace comve

#endif  // COMVE_COUNT_BACKENDS_H_
