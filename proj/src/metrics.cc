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

#include "comve/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "comve/batch.h"
#include "comve/corpus.h"
#include "comve/error.h"

namespace comve {

AccuracyReport Accuracy(const std::vector<int>& predictions, const std::vector<int>& gold) {
  if (predictions.size() != gold.size()) {
    throw InvalidArgument("prediction and gold lists differ in length");
  }
  if (predictions.empty()) throw InvalidArgument("accuracy over an empty list");
  AccuracyReport r;
  r.total = predictions.size();
  for (std::size_t i = 0; i < r.total; ++i) r.correct += predictions[i] == gold[i];
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.total);
  return r;
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (int n = 0; n < kBleuMaxOrder; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts CountNgrams(const std::vector<std::string>& tokens, std::size_t order) {
  NgramCounts counts;
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + order)];
  }
  return counts;
}

}  // namespace

BleuStats CountBleuStats(const std::vector<std::string>& candidate,
                         const std::vector<std::vector<std::string>>& references) {
  if (references.empty()) throw InvalidArgument("BLEU needs at least one reference");
  BleuStats stats;
  stats.candidate_length = candidate.size();
  for (std::size_t order = 1; order <= kBleuMaxOrder; ++order) {
    NgramCounts max_ref;
    for (const auto& ref : references) {
      for (const auto& [gram, n] : CountNgrams(ref, order)) {
        std::size_t& slot = max_ref[gram];
        slot = std::max(slot, n);
      }
    }
    for (const auto& [gram, n] : CountNgrams(candidate, order)) {
      stats.totals[order - 1] += n;
      auto it = max_ref.find(gram);
      if (it != max_ref.end()) stats.matches[order - 1] += std::min(n, it->second);
    }
  }
  std::size_t best = references.front().size();
  const auto distance = [&](std::size_t len) {
    return len > candidate.size() ? len - candidate.size() : candidate.size() - len;
  };
  for (const auto& ref : references) {
    const std::size_t len = ref.size();
    if (distance(len) < distance(best) || (distance(len) == distance(best) && len < best)) {
      best = len;
    }
  }
  stats.reference_length = best;
  return stats;
}

BleuReport BleuFromStats(const BleuStats& stats) {
  if (stats.candidate_length == 0) throw InvalidArgument("BLEU over an empty candidate set");
  BleuReport report;
  report.candidate_length = stats.candidate_length;
  report.reference_length = stats.reference_length;
  double log_sum = 0.0;
  bool zero = false;
  for (int n = 0; n < kBleuMaxOrder; ++n) {
    const double m = static_cast<double>(stats.matches[n]);
    const double t = static_cast<double>(stats.totals[n]);
    double p = 1.0;
    if (stats.totals[n] > 0) {
      if (stats.matches[n] > 0) {
        p = m / t;
      } else if (n > 0) {
        p = 1.0 / (t + 1.0);
      } else {
        p = 0.0;
      }
    }
    report.precisions[n] = p;
    if (p == 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p);
    }
  }
  const double c = static_cast<double>(stats.candidate_length);
  const double r = static_cast<double>(stats.reference_length);
  report.brevity_penalty = c > r ? 1.0 : std::exp(1.0 - r / c);
  report.score = zero ? 0.0 : 100.0 * report.brevity_penalty * std::exp(log_sum / kBleuMaxOrder);
  report.score = std::clamp(report.score, 0.0, 100.0);
  return report;
}

BleuStats ExampleBleuStats(const std::string& candidate, const std::vector<std::string>& references,
                           const std::string& label) {
  if (references.empty()) throw InvalidArgument("example " + label + " has no references");
  std::vector<std::string> cand_tokens;
  try {
    cand_tokens = TokenizeReference(candidate);
  } catch (const InvalidArgument&) {
    throw InvalidArgument("example " + label + " has an empty candidate");
  }
  std::vector<std::vector<std::string>> ref_tokens;
  ref_tokens.reserve(references.size());
  for (const std::string& ref : references) {
    try {
      ref_tokens.push_back(TokenizeReference(ref));
    } catch (const InvalidArgument&) {
      throw InvalidArgument("example " + label + " has an empty reference");
    }
  }
  return CountBleuStats(cand_tokens, ref_tokens);
}

BleuReport CorpusBleu(const std::vector<std::string>& candidates,
                      const std::vector<std::vector<std::string>>& references,
                      const std::vector<std::string>& ids) {
  if (candidates.size() != references.size()) {
    throw InvalidArgument("candidate and reference lists differ in length");
  }
  if (!ids.empty() && ids.size() != candidates.size()) {
    throw InvalidArgument("id list differs in length from candidates");
  }
  if (candidates.empty()) throw InvalidArgument("BLEU over an empty corpus");
  return BleuFromStats(batch::BleuStatsParallel(candidates, references, ids));
}

BleuReport PerExampleBleu(const std::string& candidate,
                          const std::vector<std::string>& references) {
  return BleuFromStats(ExampleBleuStats(candidate, references, "0"));
}

nlohmann::json ToJson(const AccuracyReport& report) {
  return {{"correct", report.correct}, {"total", report.total}, {"accuracy", report.accuracy}};
}

nlohmann::json ToJson(const BleuReport& report) {
  return {{"score", report.score},
          {"precisions", report.precisions},
          {"brevity_penalty", report.brevity_penalty},
          {"candidate_length", report.candidate_length},
          {"reference_length", report.reference_length}};
}

}  // namespace comve
