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

#ifndef COMVE_SERVICE_BACKEND_H_
#define COMVE_SERVICE_BACKEND_H_

// Client side of the inference-service protocol that lets external neural
// models stand behind the backend interfaces. One JSON object per request:
//
//   {"op":"masked","tokens":[...],"position":k}
//   {"op":"classify","tokens":[...]}
//   {"op":"score","tokens":[...]}
//   {"op":"next","tokens":[...]}
//
// Distribution responses are either {"probs":{token:p,...}} or the truncated
// form {"top":[[token,logp],...],"other_logp":x}; the latter is renormalized
// here with the residual mass on the catch-all symbol kCatchAll. classify
// answers {"probs":[p0,p1]}, score answers {"score":x}. A response carrying
// {"error":"..."} is raised as an Error.

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "comve/backends.h"
#include "json.hpp"

namespace comve::service {

inline constexpr const char* kCatchAll = "<other>";

class Transport {
 public:
  virtual ~Transport() = default;
  virtual nlohmann::json Call(const nlohmann::json& request) const = 0;
  virtual bool concurrent_safe() const { return true; }
};

// POSTs each request line to an http:// URL and parses the body as JSON.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(const std::string& url, int timeout_seconds = 30);
  nlohmann::json Call(const nlohmann::json& request) const override;

  const std::string& host() const { return host_; }
  int port() const { return port_; }
  const std::string& path() const { return path_; }

 private:
  std::string host_;
  int port_ = 80;
  std::string path_ = "/";
  int timeout_seconds_;
};

nlohmann::json MaskedRequest(const TokenSequence& seq, std::size_t position);
nlohmann::json ClassifyRequest(const TokenSequence& seq);
nlohmann::json ScoreRequest(const TokenSequence& seq);
nlohmann::json NextRequest(const std::vector<std::string>& prefix);

// Full responses are renormalized when their mass is within 1e-3 of 1;
// `fallback` names the symbol unlisted tokens resolve to, if present.
VocabDistribution DecodeDistribution(const nlohmann::json& response,
                                     const std::optional<std::string>& fallback = std::nullopt);
std::array<double, 2> DecodeClassification(const nlohmann::json& response);
double DecodeScore(const nlohmann::json& response);

nlohmann::json EncodeDistribution(const VocabDistribution& dist);

class ServiceMaskedLM : public MaskedLM {
 public:
  ServiceMaskedLM(std::shared_ptr<const Transport> transport, SpecialTokens specials = {});
  bool concurrent_safe() const override { return transport_->concurrent_safe(); }

 protected:
  VocabDistribution DoPredictMasked(const TokenSequence& seq, std::size_t position) const override;

 private:
  std::shared_ptr<const Transport> transport_;
};

class ServicePairClassifier : public PairClassifier {
 public:
  ServicePairClassifier(std::shared_ptr<const Transport> transport, SpecialTokens specials = {});
  bool concurrent_safe() const override { return transport_->concurrent_safe(); }

 protected:
  std::array<double, 2> DoClassify(const TokenSequence& seq) const override;

 private:
  std::shared_ptr<const Transport> transport_;
};

class ServiceChoiceScorer : public ChoiceScorer {
 public:
  ServiceChoiceScorer(std::shared_ptr<const Transport> transport, SpecialTokens specials = {});
  bool concurrent_safe() const override { return transport_->concurrent_safe(); }

 protected:
  double DoScore(const TokenSequence& seq) const override;

 private:
  std::shared_ptr<const Transport> transport_;
};

class ServiceGenerator : public Generator {
 public:
  ServiceGenerator(std::shared_ptr<const Transport> transport,
                   std::string end_of_text = "<|endoftext|>", SpecialTokens specials = {});
  bool concurrent_safe() const override { return transport_->concurrent_safe(); }
  const std::string& end_of_text() const override { return end_of_text_; }

 protected:
  VocabDistribution DoNextToken(const std::vector<std::string>& prefix) const override;

 private:
  std::shared_ptr<const Transport> transport_;
  std::string end_of_text_;
};

// Serves protocol requests from in-process backends; any of them may be
// null, in which case the op answers with an error object. Used to expose
// the reference backends over the wire and in protocol tests.
class RequestHandler {
 public:
  const MaskedLM* masked = nullptr;
  const PairClassifier* classifier = nullptr;
  const ChoiceScorer* scorer = nullptr;
  const Generator* generator = nullptr;

  nlohmann::json Handle(const nlohmann::json& request) const;
};

// Transport that calls a RequestHandler directly.
class InProcessTransport : public Transport {
 public:
  explicit InProcessTransport(RequestHandler handler) : handler_(handler) {}
  nlohmann::json Call(const nlohmann::json& request) const override {
    return handler_.Handle(request);
  }

 private:
  RequestHandler handler_;
};

}  // namespace comve::service

#endif  // COMVE_SERVICE_BACKEND_H_
