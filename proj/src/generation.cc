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

#include "comve/generation.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "comve/batch.h"
#include "comve/csv.h"

namespace comve {

void Validate(const DecodeConfig& cfg) {
  if (cfg.max_new_tokens < 1) throw InvalidArgument("max_new_tokens must be at least 1");
  if (!(cfg.temperature > 0.0)) throw InvalidArgument("temperature must be positive");
  if (cfg.top_k && *cfg.top_k < 1) throw InvalidArgument("top_k must be at least 1");
}

std::size_t PickToken(const VocabDistribution& dist, const DecodeConfig& cfg,
                      std::mt19937_64& rng) {
  if (cfg.strategy == DecodeStrategy::kGreedy) return dist.ArgMax();

  std::vector<std::size_t> ids(dist.size());
  std::iota(ids.begin(), ids.end(), 0);
  if (cfg.top_k && static_cast<std::size_t>(*cfg.top_k) < ids.size()) {
    std::stable_sort(ids.begin(), ids.end(),
                     [&](std::size_t a, std::size_t b) { return dist.prob(a) > dist.prob(b); });
    ids.resize(static_cast<std::size_t>(*cfg.top_k));
  }
  // p^(1/T) renormalized, computed in log space relative to the maximum so
  // that tiny temperatures collapse onto the argmax instead of underflowing.
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t id : ids) {
    if (dist.prob(id) > 0.0) max_log = std::max(max_log, std::log(dist.prob(id)));
  }
  std::vector<double> weights(ids.size(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const double p = dist.prob(ids[k]);
    if (p > 0.0) weights[k] = std::exp((std::log(p) - max_log) / cfg.temperature);
    total += weights[k];
  }
  const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    acc += weights[k];
    if (u < acc && weights[k] > 0.0) return ids[k];
  }
  // Rounding left u at the top edge; take the last entry with mass.
  for (std::size_t k = ids.size(); k-- > 0;) {
    if (weights[k] > 0.0) return ids[k];
  }
  return ids.front();
}

std::uint64_t ItemSeed(std::uint64_t seed, std::size_t index) {
  // splitmix64 finalizer over (seed, index)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::string> DecodeContinuation(const std::vector<std::string>& prompt,
                                            const Generator& backend, const DecodeConfig& cfg,
                                            std::mt19937_64& rng) {
  Validate(cfg);
  std::vector<std::string> context = prompt;
  std::vector<std::string> output;
  for (int step = 0; step < cfg.max_new_tokens; ++step) {
    std::size_t id = 0;
    try {
      const VocabDistribution dist = backend.NextToken(context);
      id = PickToken(dist, cfg, rng);
      const std::string& tok = dist.token(id);
      if (tok == backend.end_of_text()) break;
      output.push_back(tok);
      context.push_back(tok);
      if (cfg.stop_tokens.count(tok)) break;
    } catch (const std::exception& e) {
      throw GenerationError(std::string("generation failed: ") + e.what(), Detokenize(output));
    }
  }
  if (output.empty()) output.push_back(".");
  return output;
}

std::vector<std::string> DecodeContinuation(const std::vector<std::string>& prompt,
                                            const Generator& backend, const DecodeConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  return DecodeContinuation(prompt, backend, cfg, rng);
}

std::string GenerateReason(std::string_view statement, const Generator& backend,
                           const DecodeConfig& cfg, std::mt19937_64& rng) {
  const std::vector<std::string> prompt = backend.Tokenize(EnsureTerminalPeriod(statement));
  return Detokenize(DecodeContinuation(prompt, backend, cfg, rng));
}

std::string GenerateReason(std::string_view statement, const Generator& backend,
                           const DecodeConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  return GenerateReason(statement, backend, cfg, rng);
}

std::string IdentityBaseline(std::string_view statement) {
  if (statement.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw InvalidArgument("empty statement");
  }
  return std::string(statement);
}

GenerationSystem ParseGenerationSystem(std::string_view s) {
  if (s == "identity") return GenerationSystem::kIdentity;
  if (s == "lm") return GenerationSystem::kLanguageModel;
  throw InvalidArgument("unknown generation method '" + std::string(s) + "'");
}

std::vector<GeneratedCandidate> BatchGenerate(const std::vector<GenerationItem>& dataset,
                                              GenerationSystem system, const Generator* backend,
                                              const DecodeConfig& cfg) {
  if (dataset.empty()) throw InvalidArgument("empty generation dataset");
  if (system == GenerationSystem::kLanguageModel) {
    if (backend == nullptr) throw InvalidArgument("lm generation needs a generator backend");
    Validate(cfg);
  }
  return batch::GenerateParallel(dataset, system, backend, cfg);
}

void WriteCandidates(const std::vector<GeneratedCandidate>& candidates, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  for (const GeneratedCandidate& c : candidates) csv::WriteRow(out, {c.id, c.text});
}

}  // namespace comve
