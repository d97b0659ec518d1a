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

#ifndef COMVE_GENERATION_H_
#define COMVE_GENERATION_H_

// Reason generation by autoregressive decoding, and the identity baseline
// that echoes the nonsense statement.

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "comve/backends.h"
#include "comve/corpus.h"
#include "comve/error.h"

namespace comve {

enum class DecodeStrategy { kGreedy, kSample };

struct DecodeConfig {
  int max_new_tokens = 30;
  DecodeStrategy strategy = DecodeStrategy::kGreedy;
  double temperature = 1.0;
  std::optional<int> top_k;
  std::uint64_t seed = 0;
  // Besides these, the backend's end-of-text token always stops decoding.
  std::set<std::string> stop_tokens = {"."};
};

void Validate(const DecodeConfig& cfg);

// Raised when the backend fails part way; carries what was decoded so far.
class GenerationError : public Error {
 public:
  GenerationError(const std::string& what, std::string partial)
      : Error(what), partial_(std::move(partial)) {}
  const std::string& partial() const { return partial_; }

 private:
  std::string partial_;
};

// Picks the next token id from a distribution: argmax for greedy, otherwise
// a draw from p^(1/T), optionally restricted to the top-k entries.
std::size_t PickToken(const VocabDistribution& dist, const DecodeConfig& cfg,
                      std::mt19937_64& rng);

// Seed of the sampling stream for item `index` of a batch.
std::uint64_t ItemSeed(std::uint64_t seed, std::size_t index);

// Extends `prompt` one token at a time. Stop tokens other than end-of-text are
// kept in the output; end-of-text is not. Never returns an empty list: a
// leading end-of-text yields ".".
std::vector<std::string> DecodeContinuation(const std::vector<std::string>& prompt,
                                            const Generator& backend, const DecodeConfig& cfg,
                                            std::mt19937_64& rng);
std::vector<std::string> DecodeContinuation(const std::vector<std::string>& prompt,
                                            const Generator& backend, const DecodeConfig& cfg);

// Prompt is the period-normalized statement; returns only the continuation.
std::string GenerateReason(std::string_view statement, const Generator& backend,
                           const DecodeConfig& cfg);
std::string GenerateReason(std::string_view statement, const Generator& backend,
                           const DecodeConfig& cfg, std::mt19937_64& rng);

std::string IdentityBaseline(std::string_view statement);

enum class GenerationSystem { kIdentity, kLanguageModel };

GenerationSystem ParseGenerationSystem(std::string_view s);  // identity, lm

struct GeneratedCandidate {
  std::string id;
  std::string text;
  std::optional<std::string> error;  // set when this item failed
};

// One candidate per item, in input order. Item i samples with its own stream
// derived from (cfg.seed, i), so results do not depend on scheduling.
std::vector<GeneratedCandidate> BatchGenerate(const std::vector<GenerationItem>& dataset,
                                              GenerationSystem system, const Generator* backend,
                                              const DecodeConfig& cfg);

void WriteCandidates(const std::vector<GeneratedCandidate>& candidates, const std::string& path);

}  // namespace comve

#endif  // COMVE_GENERATION_H_
