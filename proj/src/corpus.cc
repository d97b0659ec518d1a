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

#include "comve/corpus.h"

#include <cctype>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "comve/csv.h"
#include "comve/error.h"

namespace comve {
namespace {

bool IsBlank(std::string_view s) {
  for (unsigned char c : s) {
    if (!std::isspace(c)) return false;
  }
  return true;
}

std::vector<csv::Row> ReadData(const std::string& path, std::size_t columns) {
  std::vector<csv::Row> rows = csv::ReadFile(path);
  if (rows.empty()) throw ParseError(path, 1, "missing header row");
  if (rows.front().fields.size() != columns) {
    throw ParseError(path, rows.front().line,
                     "header has " + std::to_string(rows.front().fields.size()) +
                         " columns, expected " + std::to_string(columns));
  }
  rows.erase(rows.begin());
  std::unordered_set<std::string> seen;
  for (const csv::Row& row : rows) {
    if (row.fields.size() != columns) {
      throw ParseError(path, row.line,
                       "expected " + std::to_string(columns) + " columns, got " +
                           std::to_string(row.fields.size()));
    }
    if (!seen.insert(row.fields[0]).second) {
      throw ParseError(path, row.line, "duplicate id '" + row.fields[0] + "'");
    }
  }
  return rows;
}

// Answers files carry no header; a leading row whose first field is "id" is
// tolerated and skipped.
std::vector<csv::Row> ReadAnswers(const std::string& path) {
  std::vector<csv::Row> rows = csv::ReadFile(path);
  if (!rows.empty() && !rows.front().fields.empty() && rows.front().fields[0] == "id") {
    rows.erase(rows.begin());
  }
  std::unordered_set<std::string> seen;
  for (const csv::Row& row : rows) {
    if (row.fields.size() < 2) throw ParseError(path, row.line, "expected id and answer columns");
    if (!seen.insert(row.fields[0]).second) {
      throw ParseError(path, row.line, "duplicate id '" + row.fields[0] + "'");
    }
  }
  return rows;
}

int ParseLabel(const std::string& path, const csv::Row& row, int num_classes) {
  std::string s = row.fields[1];
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  if (s.size() == 1) {
    if (s[0] >= '0' && s[0] < '0' + num_classes) return s[0] - '0';
    // Letter labels ("A", "B", "C") are used for three-way answers.
    if (num_classes == 3 && s[0] >= 'A' && s[0] <= 'C') return s[0] - 'A';
  }
  throw ParseError(path, row.line, "invalid label '" + row.fields[1] + "'");
}

// Matches answers to data ids; every data id must be answered and every
// answered id must exist in the data.
template <typename Item, typename Attach>
void AttachAnswers(std::vector<Item>& items, const std::string& path, Attach attach) {
  std::vector<csv::Row> rows = ReadAnswers(path);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < items.size(); ++i) index.emplace(items[i].id, i);
  std::vector<bool> answered(items.size(), false);
  for (const csv::Row& row : rows) {
    auto it = index.find(row.fields[0]);
    if (it == index.end()) {
      throw ParseError(path, row.line, "answer id '" + row.fields[0] + "' not in data");
    }
    attach(items[it->second], row);
    answered[it->second] = true;
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!answered[i]) throw Error(path + ": no answer for id '" + items[i].id + "'");
  }
}

}  // namespace

Subtask ParseSubtask(std::string_view s) {
  if (s == "A" || s == "a") return Subtask::kA;
  if (s == "B" || s == "b") return Subtask::kB;
  if (s == "C" || s == "c") return Subtask::kC;
  throw InvalidArgument("unknown subtask '" + std::string(s) + "'");
}

std::string_view SubtaskName(Subtask t) {
  switch (t) {
    case Subtask::kA: return "A";
    case Subtask::kB: return "B";
    case Subtask::kC: return "C";
  }
  return "?";
}

void Validate(const StatementPair& pair) {
  if (IsBlank(pair.sent0) || IsBlank(pair.sent1)) {
    throw InvalidArgument("pair '" + pair.id + "': empty statement");
  }
  if (pair.nonsense_index && *pair.nonsense_index != 0 && *pair.nonsense_index != 1) {
    throw InvalidArgument("pair '" + pair.id + "': nonsense_index out of range");
  }
}

void Validate(const ExplanationItem& item) {
  if (IsBlank(item.false_statement)) {
    throw InvalidArgument("item '" + item.id + "': empty statement");
  }
  for (const std::string& option : item.options) {
    if (IsBlank(option)) throw InvalidArgument("item '" + item.id + "': missing option");
  }
  if (item.gold_index && (*item.gold_index < 0 || *item.gold_index > 2)) {
    throw InvalidArgument("item '" + item.id + "': gold_index out of range");
  }
}

void Validate(const GenerationItem& item) {
  if (IsBlank(item.false_statement)) {
    throw InvalidArgument("item '" + item.id + "': empty statement");
  }
  if (item.references.size() > 3) {
    throw InvalidArgument("item '" + item.id + "': more than three references");
  }
  for (const std::string& ref : item.references) {
    if (IsBlank(ref)) throw InvalidArgument("item '" + item.id + "': empty reference");
  }
}

std::vector<StatementPair> LoadStatementPairs(const std::string& data_path,
                                              const std::optional<std::string>& answers_path) {
  std::vector<StatementPair> pairs;
  for (const csv::Row& row : ReadData(data_path, 3)) {
    StatementPair pair{row.fields[0], row.fields[1], row.fields[2], std::nullopt};
    try {
      Validate(pair);
    } catch (const InvalidArgument& e) {
      throw ParseError(data_path, row.line, e.what());
    }
    pairs.push_back(std::move(pair));
  }
  if (answers_path) {
    AttachAnswers(pairs, *answers_path, [&](StatementPair& p, const csv::Row& row) {
      p.nonsense_index = ParseLabel(*answers_path, row, 2);
    });
  }
  return pairs;
}

std::vector<ExplanationItem> LoadExplanationItems(const std::string& data_path,
                                                  const std::optional<std::string>& answers_path) {
  std::vector<ExplanationItem> items;
  for (const csv::Row& row : ReadData(data_path, 5)) {
    ExplanationItem item{row.fields[0], row.fields[1],
                         {row.fields[2], row.fields[3], row.fields[4]}, std::nullopt};
    try {
      Validate(item);
    } catch (const InvalidArgument& e) {
      throw ParseError(data_path, row.line, e.what());
    }
    items.push_back(std::move(item));
  }
  if (answers_path) {
    AttachAnswers(items, *answers_path, [&](ExplanationItem& it, const csv::Row& row) {
      it.gold_index = ParseLabel(*answers_path, row, 3);
    });
  }
  return items;
}

std::vector<GenerationItem> LoadGenerationItems(const std::string& data_path,
                                                const std::optional<std::string>& answers_path) {
  std::vector<GenerationItem> items;
  for (const csv::Row& row : ReadData(data_path, 2)) {
    GenerationItem item{row.fields[0], row.fields[1], {}};
    try {
      Validate(item);
    } catch (const InvalidArgument& e) {
      throw ParseError(data_path, row.line, e.what());
    }
    items.push_back(std::move(item));
  }
  if (answers_path) {
    AttachAnswers(items, *answers_path, [&](GenerationItem& it, const csv::Row& row) {
      if (row.fields.size() > 4) {
        throw ParseError(*answers_path, row.line, "more than three references");
      }
      std::vector<std::string> refs;
      for (std::size_t i = 1; i < row.fields.size(); ++i) {
        if (!IsBlank(row.fields[i])) refs.push_back(row.fields[i]);
      }
      if (refs.empty()) throw ParseError(*answers_path, row.line, "no reference text");
      it.references = std::move(refs);
    });
  }
  return items;
}

Dataset LoadDataset(Subtask kind, const std::string& data_path,
                    const std::optional<std::string>& answers_path) {
  switch (kind) {
    case Subtask::kA: return LoadStatementPairs(data_path, answers_path);
    case Subtask::kB: return LoadExplanationItems(data_path, answers_path);
    case Subtask::kC: return LoadGenerationItems(data_path, answers_path);
  }
  throw InvalidArgument("unknown subtask");
}

namespace {

std::ofstream OpenForWrite(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  return out;
}

struct DatasetWriter {
  const std::string& data_path;
  const std::optional<std::string>& answers_path;

  void operator()(const std::vector<StatementPair>& pairs) const {
    std::ofstream data = OpenForWrite(data_path);
    csv::WriteRow(data, {"id", "sent0", "sent1"});
    for (const auto& p : pairs) csv::WriteRow(data, {p.id, p.sent0, p.sent1});
    if (!answers_path) return;
    std::ofstream answers = OpenForWrite(*answers_path);
    for (const auto& p : pairs) {
      if (p.nonsense_index) csv::WriteRow(answers, {p.id, std::to_string(*p.nonsense_index)});
    }
  }

  void operator()(const std::vector<ExplanationItem>& items) const {
    std::ofstream data = OpenForWrite(data_path);
    csv::WriteRow(data, {"id", "FalseSent", "OptionA", "OptionB", "OptionC"});
    for (const auto& it : items) {
      csv::WriteRow(data, {it.id, it.false_statement, it.options[0], it.options[1], it.options[2]});
    }
    if (!answers_path) return;
    std::ofstream answers = OpenForWrite(*answers_path);
    for (const auto& it : items) {
      if (it.gold_index) csv::WriteRow(answers, {it.id, std::to_string(*it.gold_index)});
    }
  }

  void operator()(const std::vector<GenerationItem>& items) const {
    std::ofstream data = OpenForWrite(data_path);
    csv::WriteRow(data, {"id", "FalseSent"});
    for (const auto& it : items) csv::WriteRow(data, {it.id, it.false_statement});
    if (!answers_path) return;
    std::ofstream answers = OpenForWrite(*answers_path);
    for (const auto& it : items) {
      if (it.references.empty()) continue;
      std::vector<std::string> row{it.id};
      row.insert(row.end(), it.references.begin(), it.references.end());
      csv::WriteRow(answers, row);
    }
  }
};

}  // namespace

void WriteDataset(const Dataset& dataset, const std::string& data_path,
                  const std::optional<std::string>& answers_path) {
  std::visit(DatasetWriter{data_path, answers_path}, dataset);
}

std::string EnsureTerminalPeriod(std::string_view text) {
  std::size_t end = text.size();
  while (end > 0 && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  if (end == 0) throw InvalidArgument("empty statement");
  std::string out(text.substr(0, end));
  const char last = out.back();
  if (last != '.' && last != '!' && last != '?') out.push_back('.');
  return out;
}

std::vector<std::string> TokenizeReference(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c)) {
      flush();
      tokens.emplace_back(1, ch);
    } else {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
  }
  flush();
  if (tokens.empty()) throw InvalidArgument("cannot tokenize empty text");
  return tokens;
}

std::string Detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (const std::string& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

TokenSequence WrapSpecial(std::vector<std::string> tokens, const SpecialTokens& specials) {
  if (tokens.empty()) throw InvalidArgument("cannot wrap an empty token list");
  if (tokens.size() >= 2 && tokens.front() == specials.begin && tokens.back() == specials.end) {
    throw InvalidArgument("token list already carries boundary markers");
  }
  TokenSequence seq;
  seq.tokens.reserve(tokens.size() + 2);
  seq.tokens.push_back(specials.begin);
  for (std::string& t : tokens) seq.tokens.push_back(std::move(t));
  seq.tokens.push_back(specials.end);
  seq.has_specials = true;
  return seq;
}

TokenSequence WrapSpecial(const TokenSequence& seq, const SpecialTokens& specials) {
  if (seq.has_specials) throw InvalidArgument("sequence is already wrapped");
  return WrapSpecial(seq.tokens, specials);
}

}  // namespace comve
