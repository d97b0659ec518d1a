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

#ifndef COMVE_CORPUS_H_
#define COMVE_CORPUS_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace comve {

enum class Subtask { kA, kB, kC };

Subtask ParseSubtask(std::string_view s);  // "A"/"a", "B", "C"
std::string_view SubtaskName(Subtask t);

// Subtask A example: which of two similar statements does not make sense.
struct StatementPair {
  std::string id;
  std::string sent0;
  std::string sent1;
  std::optional<int> nonsense_index;  // 0 or 1; absent for unlabeled data

  const std::string& statement(int i) const { return i == 0 ? sent0 : sent1; }
};

// Subtask B example: a nonsense statement and three candidate reasons.
struct ExplanationItem {
  std::string id;
  std::string false_statement;
  std::array<std::string, 3> options;
  std::optional<int> gold_index;  // 0..2
};

// Subtask C example: a nonsense statement and its reference reasons.
struct GenerationItem {
  std::string id;
  std::string false_statement;
  std::vector<std::string> references;  // empty for unlabeled data
};

using Dataset = std::variant<std::vector<StatementPair>,
                             std::vector<ExplanationItem>,
                             std::vector<GenerationItem>>;

// Boundary and control symbols of a model vocabulary.
struct SpecialTokens {
  std::string begin = "[CLS]";
  std::string end = "[SEP]";
  std::string mask = "[MASK]";
  std::string unknown = "[UNK]";
};

struct TokenSequence {
  std::vector<std::string> tokens;
  bool has_specials = false;

  std::size_t size() const { return tokens.size(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }
  bool operator==(const TokenSequence&) const = default;
};

// Checks the field invariants of each example type; throws InvalidArgument.
void Validate(const StatementPair& pair);
void Validate(const ExplanationItem& item);
void Validate(const GenerationItem& item);

// Loads a data file (with header row) and, optionally, the matching answers
// file (no header row). Examples come back in file order. Throws ParseError
// for malformed rows, Error for duplicate or unmatched ids.
Dataset LoadDataset(Subtask kind, const std::string& data_path,
                    const std::optional<std::string>& answers_path = std::nullopt);

std::vector<StatementPair> LoadStatementPairs(
    const std::string& data_path, const std::optional<std::string>& answers_path = std::nullopt);
std::vector<ExplanationItem> LoadExplanationItems(
    const std::string& data_path, const std::optional<std::string>& answers_path = std::nullopt);
std::vector<GenerationItem> LoadGenerationItems(
    const std::string& data_path, const std::optional<std::string>& answers_path = std::nullopt);

// Writes the data file and, when any example is labeled, the answers file.
void WriteDataset(const Dataset& dataset, const std::string& data_path,
                  const std::optional<std::string>& answers_path = std::nullopt);

// Appends "." unless the text already ends in '.', '!' or '?'. Trailing
// whitespace is removed first. Throws InvalidArgument on blank text.
std::string EnsureTerminalPeriod(std::string_view text);

// Reference tokenizer: ASCII-lowercases, splits punctuation characters into
// standalone tokens and splits on whitespace.
std::vector<std::string> TokenizeReference(std::string_view text);

// Joins tokens with single spaces.
std::string Detokenize(const std::vector<std::string>& tokens);

// Attaches begin/end markers. Rejects empty input and already-wrapped input.
TokenSequence WrapSpecial(std::vector<std::string> tokens, const SpecialTokens& specials);
TokenSequence WrapSpecial(const TokenSequence& seq, const SpecialTokens& specials);

}  // namespace comve

#endif  // COMVE_CORPUS_H_
