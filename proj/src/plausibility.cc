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

#include "comve/plausibility.h"

#include <algorithm>
#include <cmath>

#include "comve/error.h"

namespace comve {

Normalization ParseNormalization(std::string_view s) {
  if (s == "raw") return Normalization::kRaw;
  if (s == "length-root" || s == "length_root") return Normalization::kLengthRoot;
  if (s == "perplexity") return Normalization::kPerplexity;
  throw InvalidArgument("unknown normalization '" + std::string(s) + "'");
}

std::string_view NormalizationName(Normalization mode) {
  switch (mode) {
    case Normalization::kRaw: return "raw";
    case Normalization::kLengthRoot: return "length-root";
    case Normalization::kPerplexity: return "perplexity";
  }
  return "?";
}

std::vector<MaskedVariant> EnumerateMaskedVariants(const TokenSequence& seq,
                                                   const SpecialTokens& specials,
                                                   bool content_only) {
  if (!seq.has_specials || seq.size() < 3) {
    throw InvalidArgument("masking needs a wrapped sequence with at least one interior token");
  }
  const std::size_t first = content_only ? 1 : 0;
  const std::size_t last = content_only ? seq.size() - 1 : seq.size();
  std::vector<MaskedVariant> variants;
  variants.reserve(last - first);
  for (std::size_t pos = first; pos < last; ++pos) {
    MaskedVariant v{seq, pos, seq[pos]};
    v.sequence.tokens[pos] = specials.mask;
    variants.push_back(std::move(v));
  }
  return variants;
}

PlausibilityScore PseudoLogLikelihood(const TokenSequence& seq, const MaskedLM& backend,
                                      bool content_only, double floor) {
  if (!(floor > 0.0) || floor > 1.0) throw InvalidArgument("probability floor must be in (0, 1]");
  PlausibilityScore score;
  for (const MaskedVariant& v : EnumerateMaskedVariants(seq, backend.specials(), content_only)) {
    double p = backend.PredictMasked(v.sequence, v.masked_position).Probability(v.original_token);
    if (p < floor) {
      p = floor;
      score.floored = true;
    }
    score.log_prob_sum += std::log(std::min(p, 1.0));
    ++score.token_count;
  }
  score.mode = Normalization::kRaw;
  score.value = score.log_prob_sum;
  return score;
}

PlausibilityScore ApplyNormalization(const PlausibilityScore& score, Normalization mode) {
  if (score.mode != Normalization::kRaw) throw InvalidArgument("score is already normalized");
  if (score.token_count == 0) throw InvalidArgument("cannot normalize a score over zero tokens");
  PlausibilityScore out = score;
  out.mode = mode;
  const double per_token = score.log_prob_sum / static_cast<double>(score.token_count);
  switch (mode) {
    case Normalization::kRaw: out.value = score.log_prob_sum; break;
    case Normalization::kLengthRoot: out.value = std::exp(per_token); break;
    case Normalization::kPerplexity: out.value = std::exp(-per_token); break;
  }
  return out;
}

bool MorePlausible(const PlausibilityScore& a, const PlausibilityScore& b) {
  return a.mode == Normalization::kPerplexity ? a.value < b.value : a.value > b.value;
}

TokenSequence PrepareStatement(std::string_view text, const Backend& backend) {
  return WrapSpecial(backend.Tokenize(EnsureTerminalPeriod(text)), backend.specials());
}

PlausibilityScore ScoreStatement(std::string_view text, const MaskedLM& backend,
                                 const PlausibilityOptions& options) {
  const TokenSequence seq = PrepareStatement(text, backend);
  return ApplyNormalization(PseudoLogLikelihood(seq, backend, options.content_only, options.floor),
                            options.mode);
}

PlausibleChoice DecidePlausible(const std::array<PlausibilityScore, 2>& scores) {
  PlausibleChoice choice;
  choice.scores = scores;
  if (std::abs(scores[0].value - scores[1].value) <= kPlausibilityTieTolerance) {
    choice.tie = true;
    choice.index = 0;
  } else {
    choice.index = MorePlausible(scores[1], scores[0]) ? 1 : 0;
  }
  return choice;
}

PlausibleChoice ChoosePlausible(const StatementPair& pair, const MaskedLM& backend,
                                const PlausibilityOptions& options) {
  return DecidePlausible({ScoreStatement(pair.sent0, backend, options),
                          ScoreStatement(pair.sent1, backend, options)});
}

int PredictNonsense(const StatementPair& pair, const MaskedLM& backend,
                    const PlausibilityOptions& options) {
  return 1 - ChoosePlausible(pair, backend, options).index;
}

double PllChoiceScorer::DoScore(const TokenSequence& seq) const {
  const PlausibilityScore s = ApplyNormalization(
      PseudoLogLikelihood(seq, backend_, options_.content_only, options_.floor), options_.mode);
  return s.mode == Normalization::kPerplexity ? -s.value : s.value;
}

}  // namespace comve
