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

#include "comve/count_backends.h"

#include <algorithm>
#include <set>

#include "comve/error.h"

namespace comve {

UnigramMaskedLM::UnigramMaskedLM(const std::vector<std::string>& corpus, double alpha,
                                 SpecialTokens specials)
    : MaskedLM(std::move(specials)), alpha_(alpha) {
  if (corpus.empty()) throw InvalidArgument("count backend needs a non-empty corpus");
  if (!(alpha > 0.0)) throw InvalidArgument("smoothing alpha must be positive");
  const SpecialTokens& sp = this->specials();
  const std::vector<std::string> reserved = {sp.begin, sp.end, sp.mask, sp.unknown};

  for (const std::string& text : corpus) {
    for (std::string& tok : Tokenize(text)) ++counts_[std::move(tok)];
  }
  std::set<std::string> content;
  for (const auto& [tok, n] : counts_) {
    total_count_ += n;
    if (std::find(reserved.begin(), reserved.end(), tok) == reserved.end()) content.insert(tok);
  }
  content_size_ = content.size();

  std::vector<std::string> tokens = reserved;
  tokens.insert(tokens.end(), content.begin(), content.end());
  vocab_ = std::make_shared<const Vocabulary>(std::move(tokens));

  std::vector<double> weights(vocab_->size());
  double norm = 0.0;
  for (std::size_t i = 0; i < vocab_->size(); ++i) {
    const double n = static_cast<double>(count(vocab_->token(i)));
    weights[i] = i < reserved.size() ? n : n + alpha_;
    norm += weights[i];
  }
  for (double& w : weights) w /= norm;
  distribution_.emplace(vocab_, std::move(weights), sp.unknown);
}

std::size_t UnigramMaskedLM::count(const std::string& token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

VocabDistribution UnigramMaskedLM::DoPredictMasked(const TokenSequence&, std::size_t) const {
  return *distribution_;
}

std::unique_ptr<UnigramMaskedLM> TrainCountBackend(const std::vector<std::string>& corpus,
                                                   double alpha, SpecialTokens specials) {
  return std::make_unique<UnigramMaskedLM>(corpus, alpha, std::move(specials));
}

UniformMaskedLM::UniformMaskedLM(std::vector<std::string> vocabulary, SpecialTokens specials)
    : MaskedLM(std::move(specials)),
      vocab_(std::make_shared<const Vocabulary>(std::move(vocabulary))) {
  if (vocab_->size() == 0) throw InvalidArgument("uniform backend needs a vocabulary");
}

VocabDistribution UniformMaskedLM::DoPredictMasked(const TokenSequence&, std::size_t) const {
  return VocabDistribution(vocab_, std::vector<double>(vocab_->size(), 1.0 / vocab_->size()));
}

namespace {

Vocabulary CorpusVocabulary(const std::vector<std::string>& corpus) {
  std::set<std::string> seen;
  for (const std::string& text : corpus) {
    for (std::string& tok : TokenizeReference(text)) seen.insert(std::move(tok));
  }
  return Vocabulary(std::vector<std::string>(seen.begin(), seen.end()));
}

}  // namespace

UnknownCountClassifier::UnknownCountClassifier(const std::vector<std::string>& corpus,
                                               SpecialTokens specials)
    : UnknownCountClassifier(CorpusVocabulary(corpus), std::move(specials)) {}

UnknownCountClassifier::UnknownCountClassifier(Vocabulary known, SpecialTokens specials)
    : PairClassifier(std::move(specials)), known_(std::move(known)) {}

std::size_t UnknownCountClassifier::CountUnknown(const std::vector<std::string>& tokens) const {
  return static_cast<std::size_t>(std::count_if(
      tokens.begin(), tokens.end(), [&](const std::string& t) { return !known_.Contains(t); }));
}

std::array<double, 2> UnknownCountClassifier::DoClassify(const TokenSequence& seq) const {
  const auto [first, second] = SplitPairSegments(seq, specials());
  const double u0 = static_cast<double>(CountUnknown(first));
  const double u1 = static_cast<double>(CountUnknown(second));
  const double denom = u0 + u1 + 2.0;
  return {(u0 + 1.0) / denom, (u1 + 1.0) / denom};
}

BigramGenerator::BigramGenerator(const std::vector<std::string>& corpus, double alpha,
                                 SpecialTokens specials)
    : Generator(std::move(specials)), alpha_(alpha) {
  if (corpus.empty()) throw InvalidArgument("bigram backend needs a non-empty corpus");
  if (!(alpha > 0.0)) throw InvalidArgument("smoothing alpha must be positive");

  std::vector<std::vector<std::string>> texts;
  std::set<std::string> content;
  for (const std::string& text : corpus) {
    texts.push_back(Tokenize(text));
    content.insert(texts.back().begin(), texts.back().end());
  }
  content.erase(end_of_text_);
  content.erase(begin_of_text_);
  std::vector<std::string> tokens{end_of_text_};
  tokens.insert(tokens.end(), content.begin(), content.end());
  vocab_ = std::make_shared<const Vocabulary>(std::move(tokens));

  for (const auto& toks : texts) {
    std::string history = begin_of_text_;
    for (const std::string& tok : toks) {
      ++bigrams_[history][*vocab_->Find(tok)];
      ++history_totals_[history];
      history = tok;
    }
    ++bigrams_[history][0];
    ++history_totals_[history];
  }
}

std::size_t BigramGenerator::BigramCount(const std::string& history,
                                         const std::string& next) const {
  auto h = bigrams_.find(history);
  auto id = vocab_->Find(next);
  if (h == bigrams_.end() || !id) return 0;
  auto it = h->second.find(*id);
  return it == h->second.end() ? 0 : it->second;
}

std::size_t BigramGenerator::HistoryCount(const std::string& history) const {
  auto it = history_totals_.find(history);
  return it == history_totals_.end() ? 0 : it->second;
}

std::string BigramGenerator::HistoryKey(const std::vector<std::string>& prefix) const {
  if (prefix.empty()) return begin_of_text_;
  const std::string& last = prefix.back();
  if (last != end_of_text_ && vocab_->Contains(last)) return last;
  return specials().unknown;
}

VocabDistribution BigramGenerator::DoNextToken(const std::vector<std::string>& prefix) const {
  const std::string key = HistoryKey(prefix);
  const double v = static_cast<double>(vocab_->size());
  const double total = static_cast<double>(HistoryCount(key));
  std::vector<double> probs(vocab_->size(), alpha_ / (total + alpha_ * v));
  if (auto h = bigrams_.find(key); h != bigrams_.end()) {
    for (const auto& [id, n] : h->second) {
      probs[id] = (static_cast<double>(n) + alpha_) / (total + alpha_ * v);
    }
  }
  return VocabDistribution(vocab_, std::move(probs));
}

}  // namespace comve
