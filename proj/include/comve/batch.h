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

#ifndef COMVE_BATCH_H_
#define COMVE_BATCH_H_

// Dataset-level kernels. Every kernel has an OpenMP version and a serial
// reference version with identical results; the serial one is kept for
// testing and benchmarking. Items are independent, so the parallel versions
// only distribute the loop. Backends that are not concurrent_safe() run on a
// single thread.

#include <optional>
#include <string>
#include <vector>

#include "comve/choice.h"
#include "comve/corpus.h"
#include "comve/generation.h"
#include "comve/metrics.h"
#include "comve/plausibility.h"

namespace comve::batch {

// Per-item results; errors[i] is set when item i failed and values[i] is then
// default-constructed.
template <typename T>
struct BatchResult {
  std::vector<T> values;
  std::vector<std::optional<std::string>> errors;

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& e : errors) n += e.has_value();
    return n;
  }
};

BatchResult<PlausibleChoice> ScorePairsSerial(const std::vector<StatementPair>& pairs,
                                              const MaskedLM& backend,
                                              const PlausibilityOptions& options);
BatchResult<PlausibleChoice> ScorePairsParallel(const std::vector<StatementPair>& pairs,
                                                const MaskedLM& backend,
                                                const PlausibilityOptions& options);

BatchResult<ValidationDecision> ClassifyPairsSerial(const std::vector<StatementPair>& pairs,
                                                    const PairClassifier& classifier);
BatchResult<ValidationDecision> ClassifyPairsParallel(const std::vector<StatementPair>& pairs,
                                                      const PairClassifier& classifier);

BatchResult<ChoiceDecision> SelectChoicesSerial(const std::vector<ChoiceSet>& sets,
                                                const ChoiceScorer& scorer);
BatchResult<ChoiceDecision> SelectChoicesParallel(const std::vector<ChoiceSet>& sets,
                                                  const ChoiceScorer& scorer);

std::vector<GeneratedCandidate> GenerateSerial(const std::vector<GenerationItem>& dataset,
                                               GenerationSystem system, const Generator* backend,
                                               const DecodeConfig& cfg);
std::vector<GeneratedCandidate> GenerateParallel(const std::vector<GenerationItem>& dataset,
                                                 GenerationSystem system,
                                                 const Generator* backend,
                                                 const DecodeConfig& cfg);

// Summed BLEU statistics; throws on the first (lowest-index) bad example.
BleuStats BleuStatsSerial(const std::vector<std::string>& candidates,
                          const std::vector<std::vector<std::string>>& references,
                          const std::vector<std::string>& ids = {});
BleuStats BleuStatsParallel(const std::vector<std::string>& candidates,
                            const std::vector<std::vector<std::string>>& references,
                            const std::vector<std::string>& ids = {});

}  // namespace comve::batch

#endif  // COMVE_BATCH_H_
