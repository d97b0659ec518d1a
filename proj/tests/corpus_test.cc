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

#include <sstream>

#include <gtest/gtest.h>

#include "comve/corpus.h"
#include "comve/csv.h"
#include "comve/error.h"
#include "oracles.h"

namespace comve {
namespace {

using Strings = std::vector<std::string>;

TEST(Csv, QuotedFieldsAndCrlf) {
  std::istringstream in("\xEF\xBB\xBFid,text\r\n1,\"a, \"\"b\"\"\"\r\n\r\n2,\"multi\nline\"\n");
  const auto rows = csv::ReadAll(in, "mem");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].fields, (Strings{"id", "text"}));
  EXPECT_EQ(rows[1].fields, (Strings{"1", "a, \"b\""}));
  EXPECT_EQ(rows[1].line, 2u);
  EXPECT_EQ(rows[2].fields, (Strings{"2", "multi\nline"}));
  EXPECT_EQ(rows[2].line, 4u);
}

TEST(Csv, EscapeRoundTrip) {
  const Strings fields = {"plain", "with,comma", "with \"quote\"", ""};
  std::ostringstream out;
  csv::WriteRow(out, fields);
  std::istringstream in(out.str());
  const auto rows = csv::ReadAll(in, "mem");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].fields, fields);
}

TEST(Csv, UnterminatedQuoteIsParseError) {
  std::istringstream in("1,\"open\n");
  EXPECT_THROW(csv::ReadAll(in, "mem"), ParseError);
}

TEST(Corpus, LoadSubtaskAWithAnswers) {
  oracle::TempDir dir;
  const auto data = dir.Write("a.csv", "id,sent0,sent1\n1,He drinks apple.,He drinks apple juice.\n");
  const auto answers = dir.Write("a_ans.csv", "1,0\n");
  const auto pairs = LoadStatementPairs(data, answers);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].id, "1");
  EXPECT_EQ(pairs[0].sent0, "He drinks apple.");
  EXPECT_EQ(pairs[0].sent1, "He drinks apple juice.");
  EXPECT_EQ(pairs[0].nonsense_index, 0);
}

TEST(Corpus, LoadSubtaskBWithAnswers) {
  oracle::TempDir dir;
  const auto data = dir.Write(
      "b.csv", "id,FalseSent,OptionA,OptionB,OptionC\n7,He drinks apple.,Apple is red.,"
               "Apple can not be drunk.,He likes apples.\n");
  const auto answers = dir.Write("b_ans.csv", "7,B\n");
  const auto items = LoadExplanationItems(data, answers);
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(items[0].options[1], "Apple can not be drunk.");
  EXPECT_EQ(items[0].gold_index, 1);
}

TEST(Corpus, LoadSubtaskCWithoutAnswers) {
  oracle::TempDir dir;
  const auto data = dir.Write("c.csv", "id,FalseSent\n1,He drinks apple.\n2,\"Cats, fly.\"\n");
  const auto items = LoadGenerationItems(data);
  ASSERT_EQ(items.size(), 2u);
  EXPECT_TRUE(items[0].references.empty());
  EXPECT_EQ(items[1].false_statement, "Cats, fly.");
}

TEST(Corpus, LoadSubtaskCReferences) {
  oracle::TempDir dir;
  const auto data = dir.Write("c.csv", "id,FalseSent\n1,He drinks apple.\n");
  const auto answers = dir.Write("c_ans.csv", "1,Apple is solid.,You eat apples.,\n");
  const auto items = LoadGenerationItems(data, answers);
  EXPECT_EQ(items[0].references, (Strings{"Apple is solid.", "You eat apples."}));
}

TEST(Corpus, WrongColumnCountNamesLine) {
  oracle::TempDir dir;
  const auto data = dir.Write("a.csv", "id,sent0,sent1\n1,a,b\n2,only\n");
  try {
    LoadStatementPairs(data);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Corpus, DuplicateIdRejected) {
  oracle::TempDir dir;
  const auto data = dir.Write("a.csv", "id,sent0,sent1\n1,a,b\n1,c,d\n");
  EXPECT_THROW(LoadStatementPairs(data), ParseError);
}

TEST(Corpus, AnswerIdMissingFromDataRejected) {
  oracle::TempDir dir;
  const auto data = dir.Write("a.csv", "id,sent0,sent1\n1,a,b\n");
  const auto answers = dir.Write("ans.csv", "1,0\n9,1\n");
  EXPECT_THROW(LoadStatementPairs(data, answers), Error);
}

TEST(Corpus, AnswersMustCoverData) {
  oracle::TempDir dir;
  const auto data = dir.Write("a.csv", "id,sent0,sent1\n1,a,b\n2,c,d\n");
  const auto answers = dir.Write("ans.csv", "1,0\n");
  EXPECT_THROW(LoadStatementPairs(data, answers), Error);
}

TEST(Corpus, BadLabelRejected) {
  oracle::TempDir dir;
  const auto data = dir.Write("a.csv", "id,sent0,sent1\n1,a,b\n");
  const auto answers = dir.Write("ans.csv", "1,2\n");
  EXPECT_THROW(LoadStatementPairs(data, answers), Error);
}

TEST(Corpus, EmptyStatementRejected) {
  oracle::TempDir dir;
  const auto data = dir.Write("a.csv", "id,sent0,sent1\n1,  ,b\n");
  EXPECT_THROW(LoadStatementPairs(data), Error);
}

TEST(Corpus, WriteThenLoadRoundTrips) {
  oracle::TempDir dir;
  const std::vector<StatementPair> a = {{"1", "He drinks apple.", "He, too, drinks \"juice\".", 0},
                                        {"2", "x", "y", 1}};
  WriteDataset(a, dir / "a.csv", dir / "a_ans.csv");
  const auto a2 = LoadStatementPairs(dir / "a.csv", dir / "a_ans.csv");
  ASSERT_EQ(a2.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(a2[i].id, a[i].id);
    EXPECT_EQ(a2[i].sent0, a[i].sent0);
    EXPECT_EQ(a2[i].sent1, a[i].sent1);
    EXPECT_EQ(a2[i].nonsense_index, a[i].nonsense_index);
  }

  const std::vector<ExplanationItem> b = {{"q", "s", {"o1", "o,2", "o3"}, 2}};
  WriteDataset(b, dir / "b.csv", dir / "b_ans.csv");
  const auto b2 = LoadExplanationItems(dir / "b.csv", dir / "b_ans.csv");
  EXPECT_EQ(b2[0].options, b[0].options);
  EXPECT_EQ(b2[0].gold_index, 2);

  const std::vector<GenerationItem> c = {{"z", "Cats fly.", {"Cats have no wings.", "No."}}};
  WriteDataset(c, dir / "c.csv", dir / "c_ans.csv");
  const auto c2 = LoadGenerationItems(dir / "c.csv", dir / "c_ans.csv");
  EXPECT_EQ(c2[0].false_statement, c[0].false_statement);
  EXPECT_EQ(c2[0].references, c[0].references);
}

TEST(Corpus, LoadDatasetDispatches) {
  oracle::TempDir dir;
  const auto data = dir.Write("c.csv", "id,FalseSent\n1,x\n");
  const Dataset d = LoadDataset(Subtask::kC, data);
  EXPECT_TRUE(std::holds_alternative<std::vector<GenerationItem>>(d));
}

TEST(Corpus, EnsureTerminalPeriod) {
  EXPECT_EQ(EnsureTerminalPeriod("He drinks apple"), "He drinks apple.");
  EXPECT_EQ(EnsureTerminalPeriod("He drinks apple."), "He drinks apple.");
  EXPECT_EQ(EnsureTerminalPeriod("Can he?"), "Can he?");
  EXPECT_EQ(EnsureTerminalPeriod("Stop!  "), "Stop!");
  EXPECT_EQ(EnsureTerminalPeriod("x \t"), "x.");
  EXPECT_THROW(EnsureTerminalPeriod("   "), InvalidArgument);
  EXPECT_THROW(EnsureTerminalPeriod(""), InvalidArgument);
}

TEST(Corpus, TokenizeReference) {
  EXPECT_EQ(TokenizeReference("He drinks apple."), (Strings{"he", "drinks", "apple", "."}));
  EXPECT_EQ(TokenizeReference("A  b"), (Strings{"a", "b"}));
  EXPECT_EQ(TokenizeReference("don't stop!"), (Strings{"don", "'", "t", "stop", "!"}));
  EXPECT_THROW(TokenizeReference(""), InvalidArgument);
}

TEST(Corpus, WrapSpecial) {
  const SpecialTokens sp;
  const TokenSequence s = WrapSpecial(Strings{"He", "drinks", "apple"}, sp);
  EXPECT_EQ(s.tokens, (Strings{"[CLS]", "He", "drinks", "apple", "[SEP]"}));
  EXPECT_TRUE(s.has_specials);
  EXPECT_EQ(WrapSpecial(Strings{"x"}, sp).tokens, (Strings{"[CLS]", "x", "[SEP]"}));
  EXPECT_THROW(WrapSpecial(s, sp), InvalidArgument);
  EXPECT_THROW(WrapSpecial(Strings{}, sp), InvalidArgument);
  EXPECT_THROW(WrapSpecial(Strings{"[CLS]", "x", "[SEP]"}, sp), InvalidArgument);
}

TEST(Corpus, ParseSubtask) {
  EXPECT_EQ(ParseSubtask("a"), Subtask::kA);
  EXPECT_EQ(ParseSubtask("C"), Subtask::kC);
  EXPECT_THROW(ParseSubtask("D"), InvalidArgument);
}

}  // namespace
}  // namespace comve
