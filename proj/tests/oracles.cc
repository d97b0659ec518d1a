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

#include "oracles.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace oracle {

namespace {

using Counts = std::map<Tokens, long>;

Counts NGrams(const Tokens& toks, std::size_t n) {
  Counts counts;
  if (toks.size() < n) return counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    Tokens gram(toks.begin() + static_cast<long>(i), toks.begin() + static_cast<long>(i + n));
    counts[gram] += 1;
  }
  return counts;
}

}  // namespace

BleuResult Bleu(const std::vector<Tokens>& candidates,
                const std::vector<std::vector<Tokens>>& references) {
  long num[4] = {0, 0, 0, 0};
  long den[4] = {0, 0, 0, 0};
  BleuResult out;
  for (std::size_t e = 0; e < candidates.size(); ++e) {
    const Tokens& cand = candidates[e];
    out.c += cand.size();
    std::size_t best = references[e][0].size();
    for (const Tokens& ref : references[e]) {
      const long d = std::labs(static_cast<long>(ref.size()) - static_cast<long>(cand.size()));
      const long bd = std::labs(static_cast<long>(best) - static_cast<long>(cand.size()));
      if (d < bd || (d == bd && ref.size() < best)) best = ref.size();
    }
    out.r += best;
    for (std::size_t n = 1; n <= 4; ++n) {
      const Counts cc = NGrams(cand, n);
      for (const auto& [gram, count] : cc) {
        long max_ref = 0;
        for (const Tokens& ref : references[e]) {
          const Counts rc = NGrams(ref, n);
          auto it = rc.find(gram);
          if (it != rc.end()) max_ref = std::max(max_ref, it->second);
        }
        num[n - 1] += std::min(count, max_ref);
        den[n - 1] += count;
      }
    }
  }
  double log_sum = 0.0;
  bool zero = false;
  for (int n = 0; n < 4; ++n) {
    double p;
    if (den[n] == 0) {
      p = 1.0;
    } else if (num[n] == 0 && n > 0) {
      p = 1.0 / static_cast<double>(den[n] + 1);
    } else {
      p = static_cast<double>(num[n]) / static_cast<double>(den[n]);
    }
    out.precisions[n] = p;
    if (p == 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p);
    }
  }
  out.brevity_penalty =
      out.c == 0 ? 0.0 : std::min(1.0, std::exp(1.0 - static_cast<double>(out.r) / out.c));
  out.score = zero ? 0.0 : 100.0 * out.brevity_penalty * std::exp(log_sum / 4.0);
  return out;
}

double UnigramProb(const std::vector<std::string>& corpus_lines, double alpha,
                   const std::string& token) {
  std::map<std::string, long> counts;
  long total = 0;
  for (const std::string& line : corpus_lines) {
    for (const std::string& t : Split(line)) {
      ++counts[t];
      ++total;
    }
  }
  if (token == "[CLS]" || token == "[SEP]" || token == "[MASK]" || token == "[UNK]") return 0.0;
  const double z = static_cast<double>(total) + alpha * static_cast<double>(counts.size());
  auto it = counts.find(token);
  if (it == counts.end()) return 0.0;  // unknown word: mapped to [UNK]
  return (static_cast<double>(it->second) + alpha) / z;
}

Tokens Split(const std::string& text) {
  Tokens out;
  std::istringstream is(text);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

std::string Join(const Tokens& tokens) {
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) s += ' ';
    s += tokens[i];
  }
  return s;
}

std::vector<Tokens> AllSequences(const Tokens& alphabet, std::size_t len) {
  std::vector<Tokens> out{{}};
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<Tokens> next;
    for (const Tokens& prefix : out) {
      for (const std::string& a : alphabet) {
        Tokens t = prefix;
        t.push_back(a);
        next.push_back(std::move(t));
      }
    }
    out.swap(next);
  }
  return out;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("comve-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
           std::to_string(rd()));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string TempDir::Write(const std::string& name, const std::string& content) const {
  const std::filesystem::path p = path_ / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
  return p.string();
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace {

const Tokens kWords = {"he",    "she",  "drinks", "eats", "juice", "bread", "milk",
                       "water", "the",  "cat",    "dog",  "runs",  "sleeps", "fast"};

std::string RandomSentence(std::mt19937& rng, std::size_t len) {
  std::uniform_int_distribution<std::size_t> pick(0, kWords.size() - 1);
  Tokens t;
  for (std::size_t i = 0; i < len; ++i) t.push_back(kWords[pick(rng)]);
  return Join(t);
}

}  // namespace

SyntheticA WriteSyntheticA(const TempDir& dir, std::size_t pairs, unsigned seed) {
  std::mt19937 rng(seed);
  std::string corpus;
  for (std::size_t i = 0; i < 40; ++i) corpus += RandomSentence(rng, 3 + rng() % 4) + " .\n";
  for (const std::string& w : kWords) corpus += w + "\n";  // every word seen at least once
  std::string data = "id,sent0,sent1\n";
  std::string answers;
  for (std::size_t i = 0; i < pairs; ++i) {
    Tokens sense = Split(RandomSentence(rng, 2 + rng() % 6));
    Tokens nonsense = sense;
    nonsense[rng() % nonsense.size()] = "zq" + std::to_string(i);
    const int nonsense_index = static_cast<int>(rng() % 2);
    const std::string s0 = Join(nonsense_index == 0 ? nonsense : sense);
    const std::string s1 = Join(nonsense_index == 0 ? sense : nonsense);
    data += "p" + std::to_string(i) + "," + s0 + "," + s1 + "\n";
    answers += "p" + std::to_string(i) + "," + std::to_string(nonsense_index) + "\n";
  }
  return {dir.Write("corpus.txt", corpus), dir.Write("a.csv", data),
          dir.Write("a_ans.csv", answers)};
}

SyntheticC WriteSyntheticC(const TempDir& dir, std::size_t items, unsigned seed) {
  std::mt19937 rng(seed);
  SyntheticC out;
  std::string data = "id,FalseSent\n";
  std::string answers;
  for (std::size_t i = 0; i < items; ++i) {
    const std::string id = "c" + std::to_string(i);
    const std::string statement = RandomSentence(rng, 2 + rng() % 6) + ".";
    std::vector<std::string> refs;
    const std::size_t nref = 1 + rng() % 3;
    for (std::size_t r = 0; r < nref; ++r) refs.push_back(RandomSentence(rng, 2 + rng() % 7) + ".");
    data += id + "," + statement + "\n";
    answers += id;
    for (const auto& r : refs) answers += "," + r;
    answers += "\n";
    out.statements.push_back(statement);
    out.references.push_back(refs);
  }
  out.data = dir.Write("c.csv", data);
  out.answers = dir.Write("c_ans.csv", answers);
  return out;
}

}  // namespace oracle
