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

#include <map>

#include <gtest/gtest.h>

#include "comve/choice.h"
#include "comve/count_backends.h"
#include "comve/error.h"
#include "comve/plausibility.h"

namespace comve {
namespace {

using Strings = std::vector<std::string>;

// Scores a candidate by a fixed table lookup on its joined interior.
class TableScorer : public ChoiceScorer {
 public:
  explicit TableScorer(std::map<std::string, double> table) : table_(std::move(table)) {}

 protected:
  double DoScore(const TokenSequence& seq) const override {
    std::string key;
    for (std::size_t i = 1; i + 1 < seq.size(); ++i) key += (i > 1 ? " " : "") + seq[i];
    return table_.at(key);
  }

 private:
  std::map<std::string, double> table_;
};

class FixedClassifier : public PairClassifier {
 public:
  explicit FixedClassifier(std::array<double, 2> p) : p_(p) {}

 protected:
  std::array<double, 2> DoClassify(const TokenSequence&) const override { return p_; }

 private:
  std::array<double, 2> p_;
};

TEST(ConcatPair, Layout) {
  UniformMaskedLM lm({"a"});
  const StatementPair pair{"1", "He drinks apple.", "He drinks apple juice.", std::nullopt};
  EXPECT_EQ(ConcatPair(pair, lm).tokens,
            (Strings{"[CLS]", "he", "drinks", "apple", ".", "[SEP]", "he", "drinks", "apple",
                     "juice", ".", "[SEP]"}));
  EXPECT_THROW(ConcatPair({"1", "a", "", std::nullopt}, lm), InvalidArgument);
}

TEST(ConcatPair, Asymmetric) {
  UniformMaskedLM lm({"a"});
  EXPECT_NE(ConcatPair({"1", "a", "b", std::nullopt}, lm),
            ConcatPair({"1", "b", "a", std::nullopt}, lm));
  const auto same = ConcatPair({"1", "x y", "x y", std::nullopt}, lm);
  EXPECT_EQ(same.tokens, (Strings{"[CLS]", "x", "y", ".", "[SEP]", "x", "y", ".", "[SEP]"}));
}

TEST(ClassifyValidation, UnknownCountingClassifier) {
  UnknownCountClassifier clf(Strings{"he drinks juice ."});
  const auto d = ClassifyValidation({"1", "he drinks juice", "he drinks qqq", std::nullopt}, clf);
  EXPECT_EQ(d.nonsense_index, 1);
  EXPECT_FALSE(d.tie);
  const auto t = ClassifyValidation({"2", "he drinks", "he drinks", std::nullopt}, clf);
  EXPECT_TRUE(t.tie);
  EXPECT_EQ(t.nonsense_index, 0);
  EXPECT_EQ(t.distribution[0], 0.5);
}

TEST(ClassifyValidation, Argmax) {
  FixedClassifier clf({0.9, 0.1});
  EXPECT_EQ(ClassifyValidation({"1", "a", "b", std::nullopt}, clf).nonsense_index, 0);
  EXPECT_EQ(DecideValidation({0.2, 0.8}).nonsense_index, 1);
}

TEST(BuildValidationChoices, Construction) {
  UniformMaskedLM lm({"a"});
  const auto set = BuildValidationChoices({"7", "a b", "c", 0}, lm);
  ASSERT_EQ(set.candidate_sequences.size(), 2u);
  EXPECT_EQ(set.candidate_sequences[0].tokens, (Strings{"[CLS]", "a", "b", ".", "[SEP]"}));
  EXPECT_EQ(set.candidate_sequences[1].tokens, (Strings{"[CLS]", "c", ".", "[SEP]"}));
  EXPECT_EQ(set.gold_index, 1);
  EXPECT_EQ(set.item_id, "7");
  EXPECT_FALSE(BuildValidationChoices({"7", "a", "b", std::nullopt}, lm).gold_index.has_value());
}

TEST(DecideChoice, ArgmaxAndTies) {
  EXPECT_EQ(DecideChoice({-3.0, -1.2}).index, 1);
  const auto t = DecideChoice({2.0, 2.0});
  EXPECT_EQ(t.index, 0);
  EXPECT_TRUE(t.tie);
  EXPECT_EQ(DecideChoice({-5, -1, -4}).index, 1);
  EXPECT_THROW(DecideChoice({}), InvalidArgument);
}

TEST(ChoiceSet, ValidateRejectsBadSets) {
  ChoiceSet one{"x", {TokenSequence{{"[CLS]", "a", "[SEP]"}, true}}, std::nullopt};
  EXPECT_THROW(Validate(one), InvalidArgument);
  ChoiceSet unwrapped{"x",
                      {TokenSequence{{"[CLS]", "a", "[SEP]"}, true}, TokenSequence{{"a"}, false}},
                      std::nullopt};
  EXPECT_THROW(Validate(unwrapped), InvalidArgument);
  ChoiceSet gold{"x",
                 {TokenSequence{{"[CLS]", "a", "[SEP]"}, true},
                  TokenSequence{{"[CLS]", "b", "[SEP]"}, true}},
                 2};
  EXPECT_THROW(Validate(gold), InvalidArgument);
}

TEST(SelectChoice, PllScorerReproducesChoosePlausible) {
  auto lm = TrainCountBackend({"he drinks juice .", "she eats bread .", "juice is a drink ."}, 0.7);
  const std::vector<StatementPair> pairs = {
      {"1", "he drinks juice", "he drinks bread", std::nullopt},
      {"2", "she eats stones", "she eats bread", std::nullopt},
      {"3", "juice is a drink", "bread is a drink", std::nullopt},
  };
  for (auto mode : {Normalization::kRaw, Normalization::kLengthRoot, Normalization::kPerplexity}) {
    for (bool content_only : {false, true}) {
      const PlausibilityOptions opts{mode, content_only};
      PllChoiceScorer scorer(*lm, opts);
      for (const auto& p : pairs) {
        EXPECT_EQ(SelectChoice(BuildValidationChoices(p, scorer), scorer).index,
                  ChoosePlausible(p, *lm, opts).index)
            << p.id;
      }
    }
  }
}

TEST(BuildExplanationCandidates, JoinsContextAndEnding) {
  UniformMaskedLM lm({"a"});
  const ExplanationItem item{"1", "He drinks apple", {"Apple can not be drunk", "b", "c"}, 0};
  const auto set = BuildExplanationCandidates(item, lm);
  ASSERT_EQ(set.candidate_sequences.size(), 3u);
  EXPECT_EQ(set.candidate_sequences[0].tokens,
            (Strings{"[CLS]", "he", "drinks", "apple", ".", "apple", "can", "not", "be", "drunk",
                     ".", "[SEP]"}));
  EXPECT_EQ(set.candidate_sequences[1].tokens,
            (Strings{"[CLS]", "he", "drinks", "apple", ".", "b", ".", "[SEP]"}));
  EXPECT_EQ(set.gold_index, 0);
  const auto sep = BuildExplanationCandidates(item, lm, {true});
  EXPECT_EQ(sep.candidate_sequences[1].tokens,
            (Strings{"[CLS]", "he", "drinks", "apple", ".", "[SEP]", "b", ".", "[SEP]"}));
}

TEST(SelectExplanation, TableScores) {
  TableScorer scorer({{"s . x .", -5}, {"s . y .", -1}, {"s . z .", -4}});
  EXPECT_EQ(SelectExplanation({"1", "s", {"x", "y", "z"}, std::nullopt}, scorer).index, 1);
  EXPECT_EQ(SelectExplanation({"1", "s", {"y", "z", "x"}, std::nullopt}, scorer).index, 0);
  EXPECT_EQ(SelectExplanation({"1", "s", {"x", "z", "y"}, std::nullopt}, scorer).index, 2);
}

TEST(SelectExplanation, PllScorerPrefersOptionSeenInCorpus) {
  auto lm = TrainCountBackend({"he drinks apple .", "apple can not be drunk ."}, 1.0);
  PllChoiceScorer scorer(*lm);
  const ExplanationItem item{
      "1", "He drinks apple.", {"Trees grow tall.", "Apple can not be drunk.", "Dogs bark loud."},
      1};
  EXPECT_EQ(SelectExplanation(item, scorer).index, 1);
}

}  // namespace
}  // namespace comve
