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

#include "comve/batch.h"

#include <exception>
#include <random>

#include "comve/error.h"

namespace comve::batch {
namespace {

template <typename T, typename F>
BatchResult<T> MapSerial(std::size_t n, F&& fn) {
  BatchResult<T> out;
  out.values.resize(n);
  out.errors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    try {
      out.values[i] = fn(i);
    } catch (const std::exception& e) {
      out.errors[i] = e.what();
    }
  }
  return out;
}

template <typename T, typename F>
BatchResult<T> MapParallel(std::size_t n, bool concurrent, F&& fn) {
  BatchResult<T> out;
  out.values.resize(n);
  out.errors.resize(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8) if (concurrent)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out.values[k] = fn(k);
    } catch (const std::exception& e) {
      out.errors[k] = e.what();
    }
  }
  return out;
}

GeneratedCandidate GenerateOne(const GenerationItem& item, std::size_t index,
                               GenerationSystem system, const Generator* backend,
                               const DecodeConfig& cfg) {
  GeneratedCandidate c{item.id, {}, std::nullopt};
  try {
    if (system == GenerationSystem::kIdentity) {
      c.text = IdentityBaseline(item.false_statement);
    } else {
      std::mt19937_64 rng(ItemSeed(cfg.seed, index));
      c.text = GenerateReason(item.false_statement, *backend, cfg, rng);
    }
  } catch (const GenerationError& e) {
    c.text = e.partial();
    c.error = e.what();
  } catch (const std::exception& e) {
    c.error = e.what();
  }
  return c;
}

std::string Label(const std::vector<std::string>& ids, std::size_t i) {
  return ids.empty() ? std::to_string(i) : "'" + ids[i] + "'";
}

void CheckBleuInputs(const std::vector<std::string>& candidates,
                     const std::vector<std::vector<std::string>>& references,
                     const std::vector<std::string>& ids) {
  if (candidates.size() != references.size() || (!ids.empty() && ids.size() != candidates.size())) {
    throw InvalidArgument("BLEU inputs differ in length");
  }
}

}  // namespace

BatchResult<PlausibleChoice> ScorePairsSerial(const std::vector<StatementPair>& pairs,
                                              const MaskedLM& backend,
                                              const PlausibilityOptions& options) {
  return MapSerial<PlausibleChoice>(
      pairs.size(), [&](std::size_t i) { return ChoosePlausible(pairs[i], backend, options); });
}

BatchResult<PlausibleChoice> ScorePairsParallel(const std::vector<StatementPair>& pairs,
                                                const MaskedLM& backend,
                                                const PlausibilityOptions& options) {
  return MapParallel<PlausibleChoice>(pairs.size(), backend.concurrent_safe(), [&](std::size_t i) {
    return ChoosePlausible(pairs[i], backend, options);
  });
}

BatchResult<ValidationDecision> ClassifyPairsSerial(const std::vector<StatementPair>& pairs,
                                                    const PairClassifier& classifier) {
  return MapSerial<ValidationDecision>(
      pairs.size(), [&](std::size_t i) { return ClassifyValidation(pairs[i], classifier); });
}

BatchResult<ValidationDecision> ClassifyPairsParallel(const std::vector<StatementPair>& pairs,
                                                      const PairClassifier& classifier) {
  return MapParallel<ValidationDecision>(
      pairs.size(), classifier.concurrent_safe(),
      [&](std::size_t i) { return ClassifyValidation(pairs[i], classifier); });
}

BatchResult<ChoiceDecision> SelectChoicesSerial(const std::vector<ChoiceSet>& sets,
                                                const ChoiceScorer& scorer) {
  return MapSerial<ChoiceDecision>(sets.size(),
                                   [&](std::size_t i) { return SelectChoice(sets[i], scorer); });
}

BatchResult<ChoiceDecision> SelectChoicesParallel(const std::vector<ChoiceSet>& sets,
                                                  const ChoiceScorer& scorer) {
  return MapParallel<ChoiceDecision>(sets.size(), scorer.concurrent_safe(),
                                     [&](std::size_t i) { return SelectChoice(sets[i], scorer); });
}

std::vector<GeneratedCandidate> GenerateSerial(const std::vector<GenerationItem>& dataset,
                                               GenerationSystem system, const Generator* backend,
                                               const DecodeConfig& cfg) {
  std::vector<GeneratedCandidate> out;
  out.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out.push_back(GenerateOne(dataset[i], i, system, backend, cfg));
  }
  return out;
}

std::vector<GeneratedCandidate> GenerateParallel(const std::vector<GenerationItem>& dataset,
                                                 GenerationSystem system,
                                                 const Generator* backend,
                                                 const DecodeConfig& cfg) {
  std::vector<GeneratedCandidate> out(dataset.size());
  const bool concurrent = backend == nullptr || backend->concurrent_safe();
  const auto count = static_cast<std::ptrdiff_t>(dataset.size());
#pragma omp parallel for schedule(dynamic, 4) if (concurrent)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = GenerateOne(dataset[k], k, system, backend, cfg);
  }
  return out;
}

BleuStats BleuStatsSerial(const std::vector<std::string>& candidates,
                          const std::vector<std::vector<std::string>>& references,
                          const std::vector<std::string>& ids) {
  CheckBleuInputs(candidates, references, ids);
  BleuStats total;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    total += ExampleBleuStats(candidates[i], references[i], Label(ids, i));
  }
  return total;
}

BleuStats BleuStatsParallel(const std::vector<std::string>& candidates,
                            const std::vector<std::vector<std::string>>& references,
                            const std::vector<std::string>& ids) {
  CheckBleuInputs(candidates, references, ids);
  const std::size_t n = candidates.size();
  std::vector<BleuStats> per_example(n);
  std::vector<std::exception_ptr> failures(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      per_example[k] = ExampleBleuStats(candidates[k], references[k], Label(ids, k));
    } catch (...) {
      failures[k] = std::current_exception();
    }
  }
  // Summed in index order; integer sums make the order irrelevant anyway.
  BleuStats total;
  for (std::size_t k = 0; k < n; ++k) {
    if (failures[k]) std::rethrow_exception(failures[k]);
    total += per_example[k];
  }
  return total;
}

}  // namespace comve::batch
