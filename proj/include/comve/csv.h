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

#ifndef COMVE_CSV_H_
#define COMVE_CSV_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace comve::csv {

struct Row {
  std::size_t line = 0;  // 1-based line on which the row starts
  std::vector<std::string> fields;
};

// Reads comma-separated records. Fields may be quoted with '"'; a quoted
// field may contain commas, newlines and doubled quotes. A trailing '\r'
// before a newline is dropped. Blank lines are skipped.
std::vector<Row> ReadAll(std::istream& in, const std::string& source_name);
std::vector<Row> ReadFile(const std::string& path);

// Quotes the field only when it contains a comma, quote, CR or LF.
std::string Escape(std::string_view field);
void WriteRow(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace comve::csv

#endif  // COMVE_CSV_H_
