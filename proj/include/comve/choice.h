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

#ifndef COMVE_CHOICE_H_
#define COMVE_CHOICE_H_

// Subtask A as pair classification or as a two-way multiple choice, and
// subtask B as a three-way choice over context+ending sequences.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "comve/backends.h"
#include "comve/corpus.h"

namespace comve {

struct ChoiceSet {
  std::string item_id;
  std::vector<TokenSequence> candidate_sequences;  // 2 or 3, each wrapped
  std::optional<int> gold_index;
};

void Validate(const ChoiceSet& choices);

// [begin, tokens(sent0), sep, tokens(sent1), sep]; statements are
// period-normalized first.
TokenSequence ConcatPair(const StatementPair& pair, const Backend& backend);

struct ValidationDecision {
  int nonsense_index = 0;
  bool tie = false;
  std::array<double, 2> distribution{};
};

ValidationDecision ClassifyValidation(const StatementPair& pair, const PairClassifier& classifier);
ValidationDecision DecideValidation(const std::array<double, 2>& distribution);

// Each statement wrapped on its own. gold_index names the sensible statement.
ChoiceSet BuildValidationChoices(const StatementPair& pair, const Backend& backend);

struct ChoiceDecision {
  int index = 0;
  bool tie = false;
  std::vector<double> scores;
};

ChoiceDecision SelectChoice(const ChoiceSet& choices, const ChoiceScorer& scorer);
// Argmax, lowest index on exact ties.
ChoiceDecision DecideChoice(std::vector<double> scores);

struct ExplanationOptions {
  // Put the end marker between context and ending instead of a plain space.
  bool insert_separator = false;
};

// One sequence per option: "<statement.> <option.>" tokenized and wrapped.
ChoiceSet BuildExplanationCandidates(const ExplanationItem& item, const Backend& backend,
                                     const ExplanationOptions& options = {});

ChoiceDecision SelectExplanation(const ExplanationItem& item, const ChoiceScorer& scorer,
                                 const ExplanationOptions& options = {});

}  // namespace comve

#endif  // COMVE_CHOICE_H_
