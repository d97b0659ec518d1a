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

#include "comve/choice.h"

#include "comve/error.h"
#include "comve/plausibility.h"

namespace comve {

void Validate(const ChoiceSet& choices) {
  const std::size_t n = choices.candidate_sequences.size();
  if (n < 2 || n > 3) throw InvalidArgument("choice set needs 2 or 3 candidates");
  for (const TokenSequence& seq : choices.candidate_sequences) {
    if (!seq.has_specials) throw InvalidArgument("choice candidate is not wrapped");
  }
  if (choices.gold_index && (*choices.gold_index < 0 || *choices.gold_index >= static_cast<int>(n))) {
    throw InvalidArgument("choice gold index out of range");
  }
}

TokenSequence ConcatPair(const StatementPair& pair, const Backend& backend) {
  const SpecialTokens& sp = backend.specials();
  std::vector<std::string> first = backend.Tokenize(EnsureTerminalPeriod(pair.sent0));
  std::vector<std::string> second = backend.Tokenize(EnsureTerminalPeriod(pair.sent1));
  TokenSequence seq;
  seq.tokens.reserve(first.size() + second.size() + 3);
  seq.tokens.push_back(sp.begin);
  seq.tokens.insert(seq.tokens.end(), first.begin(), first.end());
  seq.tokens.push_back(sp.end);
  seq.tokens.insert(seq.tokens.end(), second.begin(), second.end());
  seq.tokens.push_back(sp.end);
  seq.has_specials = true;
  return seq;
}

ValidationDecision DecideValidation(const std::array<double, 2>& distribution) {
  ValidationDecision d;
  d.distribution = distribution;
  d.tie = distribution[0] == distribution[1];
  d.nonsense_index = distribution[1] > distribution[0] ? 1 : 0;
  return d;
}

ValidationDecision ClassifyValidation(const StatementPair& pair, const PairClassifier& classifier) {
  return DecideValidation(classifier.Classify(ConcatPair(pair, classifier)));
}

ChoiceSet BuildValidationChoices(const StatementPair& pair, const Backend& backend) {
  Validate(pair);
  ChoiceSet set;
  set.item_id = pair.id;
  set.candidate_sequences = {PrepareStatement(pair.sent0, backend),
                             PrepareStatement(pair.sent1, backend)};
  if (pair.nonsense_index) set.gold_index = 1 - *pair.nonsense_index;
  return set;
}

ChoiceDecision DecideChoice(std::vector<double> scores) {
  if (scores.empty()) throw InvalidArgument("no scores to choose from");
  ChoiceDecision d;
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i != best && scores[i] == scores[best]) d.tie = true;
  }
  d.index = static_cast<int>(best);
  d.scores = std::move(scores);
  return d;
}

ChoiceDecision SelectChoice(const ChoiceSet& choices, const ChoiceScorer& scorer) {
  if (choices.candidate_sequences.empty()) throw InvalidArgument("empty choice set");
  std::vector<double> scores;
  scores.reserve(choices.candidate_sequences.size());
  for (const TokenSequence& seq : choices.candidate_sequences) scores.push_back(scorer.Score(seq));
  return DecideChoice(std::move(scores));
}

ChoiceSet BuildExplanationCandidates(const ExplanationItem& item, const Backend& backend,
                                     const ExplanationOptions& options) {
  Validate(item);
  const SpecialTokens& sp = backend.specials();
  const std::string context = EnsureTerminalPeriod(item.false_statement);
  ChoiceSet set;
  set.item_id = item.id;
  for (const std::string& option : item.options) {
    const std::string ending = EnsureTerminalPeriod(option);
    if (options.insert_separator) {
      std::vector<std::string> tokens = backend.Tokenize(context);
      tokens.push_back(sp.end);
      for (std::string& t : backend.Tokenize(ending)) tokens.push_back(std::move(t));
      set.candidate_sequences.push_back(WrapSpecial(std::move(tokens), sp));
    } else {
      set.candidate_sequences.push_back(
          WrapSpecial(backend.Tokenize(context + " " + ending), sp));
    }
  }
  set.gold_index = item.gold_index;
  return set;
}

ChoiceDecision SelectExplanation(const ExplanationItem& item, const ChoiceScorer& scorer,
                                 const ExplanationOptions& options) {
  return SelectChoice(BuildExplanationCandidates(item, scorer, options), scorer);
}

}  // namespace comve
