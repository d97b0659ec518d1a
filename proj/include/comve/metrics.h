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

#ifndef COMVE_METRICS_H_
#define COMVE_METRICS_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace comve {

inline constexpr int kBleuMaxOrder = 4;

struct AccuracyReport {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
};

AccuracyReport Accuracy(const std::vector<int>& predictions, const std::vector<int>& gold);

// Sufficient statistics of BLEU-4. Additive across examples.
struct BleuStats {
  std::array<std::size_t, kBleuMaxOrder> matches{};  // clipped n-gram matches
  std::array<std::size_t, kBleuMaxOrder> totals{};   // candidate n-gram counts
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& other);
  bool operator==(const BleuStats&) const = default;
};

struct BleuReport {
  double score = 0.0;  // 0..100
  std::array<double, kBleuMaxOrder> precisions{};
  double brevity_penalty = 1.0;
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;
};

// Counts clipped n-gram matches of one tokenized candidate against its
// tokenized references. The reference length is the closest reference
// length, shorter on ties.
BleuStats CountBleuStats(const std::vector<std::string>& candidate,
                         const std::vector<std::vector<std::string>>& references);

// Corpus BLEU-4 from aggregated statistics:
//   p1 = m1 / t1 (never smoothed; p1 = 0 gives score 0)
//   pn = m_n / t_n, or (0 + 1) / (t_n + 1) when m_n = 0 (n >= 2)
//   pn = 1 when t_n = 0
//   BP = min(1, exp(1 - r / c)); score = 100 * BP * exp(mean(ln pn))
BleuReport BleuFromStats(const BleuStats& stats);

// Tokenizes with the reference tokenizer. `ids`, when given, names examples
// in error messages. Throws InvalidArgument on length mismatches, empty
// reference lists and candidates without tokens.
BleuReport CorpusBleu(const std::vector<std::string>& candidates,
                      const std::vector<std::vector<std::string>>& references,
                      const std::vector<std::string>& ids = {});
BleuReport PerExampleBleu(const std::string& candidate, const std::vector<std::string>& references);

// Tokenizes one example and returns its statistics; `label` names it in errors.
BleuStats ExampleBleuStats(const std::string& candidate, const std::vector<std::string>& references,
                           const std::string& label);

nlohmann::json ToJson(const AccuracyReport& report);
nlohmann::json ToJson(const BleuReport& report);

}  // namespace comve

#endif  // COMVE_METRICS_H_
