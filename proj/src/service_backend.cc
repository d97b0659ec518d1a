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

#include "comve/service_backend.h"

#include <algorithm>
#include <cmath>

#include "comve/error.h"
#include "httplib.h"

namespace comve::service {
namespace {

using nlohmann::json;

void RaiseIfError(const json& response) {
  if (!response.is_object()) throw Error("service response is not a JSON object");
  if (auto it = response.find("error"); it != response.end()) {
    throw Error("service error: " + it->get<std::string>());
  }
}

TokenSequence SequenceFrom(const json& request) {
  TokenSequence seq;
  seq.tokens = request.at("tokens").get<std::vector<std::string>>();
  seq.has_specials = true;
  return seq;
}

}  // namespace

HttpTransport::HttpTransport(const std::string& url, int timeout_seconds)
    : timeout_seconds_(timeout_seconds) {
  const std::string scheme = "http://";
  if (url.compare(0, scheme.size(), scheme) != 0) {
    throw InvalidArgument("service URL must start with http://: " + url);
  }
  std::string rest = url.substr(scheme.size());
  const std::size_t slash = rest.find('/');
  if (slash != std::string::npos) {
    path_ = rest.substr(slash);
    rest = rest.substr(0, slash);
  }
  const std::size_t colon = rest.rfind(':');
  if (colon != std::string::npos) {
    try {
      port_ = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw InvalidArgument("bad port in service URL: " + url);
    }
    rest = rest.substr(0, colon);
  }
  if (rest.empty()) throw InvalidArgument("missing host in service URL: " + url);
  host_ = rest;
}

json HttpTransport::Call(const json& request) const {
  httplib::Client client(host_, port_);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);
  auto res = client.Post(path_, request.dump() + "\n", "application/json");
  if (!res) {
    throw Error("service request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) throw Error("service returned HTTP " + std::to_string(res->status));
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed service response: ") + e.what());
  }
}

json MaskedRequest(const TokenSequence& seq, std::size_t position) {
  return {{"op", "masked"}, {"tokens", seq.tokens}, {"position", position}};
}
json ClassifyRequest(const TokenSequence& seq) { return {{"op", "classify"}, {"tokens", seq.tokens}}; }
json ScoreRequest(const TokenSequence& seq) { return {{"op", "score"}, {"tokens", seq.tokens}}; }
json NextRequest(const std::vector<std::string>& prefix) {
  return {{"op", "next"}, {"tokens", prefix}};
}

VocabDistribution DecodeDistribution(const json& response,
                                     const std::optional<std::string>& fallback) {
  RaiseIfError(response);
  std::vector<std::string> tokens;
  std::vector<double> probs;
  std::optional<std::string> resolved_fallback;
  try {
    if (auto it = response.find("probs"); it != response.end()) {
      for (const auto& [tok, p] : it->items()) {
        tokens.push_back(tok);
        probs.push_back(p.get<double>());
      }
      if (fallback && std::find(tokens.begin(), tokens.end(), *fallback) != tokens.end()) {
        resolved_fallback = fallback;
      }
    } else if (auto top = response.find("top"); top != response.end()) {
      double listed = 0.0;
      for (const auto& entry : *top) {
        tokens.push_back(entry.at(0).get<std::string>());
        probs.push_back(std::exp(entry.at(1).get<double>()));
        listed += probs.back();
      }
      double residual = std::max(0.0, 1.0 - listed);
      if (auto other = response.find("other_logp"); other != response.end()) {
        residual = std::exp(other->get<double>());
      }
      tokens.push_back(kCatchAll);
      probs.push_back(residual);
      resolved_fallback = kCatchAll;
    } else {
      throw Error("service response has neither 'probs' nor 'top'");
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed distribution response: ") + e.what());
  }
  if (tokens.empty()) throw Error("service returned an empty distribution");
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) throw Error("service returned an invalid probability");
    total += p;
  }
  const bool truncated = resolved_fallback && *resolved_fallback == kCatchAll;
  if (!(total > 0.0) || (!truncated && std::abs(total - 1.0) > 1e-3)) {
    throw Error("service distribution has mass " + std::to_string(total));
  }
  for (double& p : probs) p /= total;
  return VocabDistribution(std::make_shared<const Vocabulary>(std::move(tokens)), std::move(probs),
                           resolved_fallback);
}

std::array<double, 2> DecodeClassification(const json& response) {
  RaiseIfError(response);
  try {
    const auto probs = response.at("probs").get<std::vector<double>>();
    if (probs.size() != 2) throw Error("classification response needs two probabilities");
    return {probs[0], probs[1]};
  } catch (const json::exception& e) {
    throw Error(std::string("malformed classification response: ") + e.what());
  }
}

double DecodeScore(const json& response) {
  RaiseIfError(response);
  try {
    return response.at("score").get<double>();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed score response: ") + e.what());
  }
}

json EncodeDistribution(const VocabDistribution& dist) {
  json probs = json::object();
  for (std::size_t i = 0; i < dist.size(); ++i) probs[dist.token(i)] = dist.prob(i);
  return {{"probs", probs}};
}

ServiceMaskedLM::ServiceMaskedLM(std::shared_ptr<const Transport> transport,
                                 SpecialTokens specials)
    : MaskedLM(std::move(specials)), transport_(std::move(transport)) {}

VocabDistribution ServiceMaskedLM::DoPredictMasked(const TokenSequence& seq,
                                                   std::size_t position) const {
  return DecodeDistribution(transport_->Call(MaskedRequest(seq, position)), specials().unknown);
}

ServicePairClassifier::ServicePairClassifier(std::shared_ptr<const Transport> transport,
                                             SpecialTokens specials)
    : PairClassifier(std::move(specials)), transport_(std::move(transport)) {}

std::array<double, 2> ServicePairClassifier::DoClassify(const TokenSequence& seq) const {
  return DecodeClassification(transport_->Call(ClassifyRequest(seq)));
}

ServiceChoiceScorer::ServiceChoiceScorer(std::shared_ptr<const Transport> transport,
                                         SpecialTokens specials)
    : ChoiceScorer(std::move(specials)), transport_(std::move(transport)) {}

double ServiceChoiceScorer::DoScore(const TokenSequence& seq) const {
  return DecodeScore(transport_->Call(ScoreRequest(seq)));
}

ServiceGenerator::ServiceGenerator(std::shared_ptr<const Transport> transport,
                                   std::string end_of_text, SpecialTokens specials)
    : Generator(std::move(specials)),
      transport_(std::move(transport)),
      end_of_text_(std::move(end_of_text)) {}

VocabDistribution ServiceGenerator::DoNextToken(const std::vector<std::string>& prefix) const {
  return DecodeDistribution(transport_->Call(NextRequest(prefix)));
}

json RequestHandler::Handle(const json& request) const {
  try {
    const std::string op = request.at("op").get<std::string>();
    if (op == "masked" && masked) {
      return EncodeDistribution(
          masked->PredictMasked(SequenceFrom(request), request.at("position").get<std::size_t>()));
    }
    if (op == "classify" && classifier) {
      const auto p = classifier->Classify(SequenceFrom(request));
      return {{"probs", {p[0], p[1]}}};
    }
    if (op == "score" && scorer) return {{"score", scorer->Score(SequenceFrom(request))}};
    if (op == "next" && generator) {
      return EncodeDistribution(
          generator->NextToken(request.at("tokens").get<std::vector<std::string>>()));
    }
    return {{"error", "unsupported op '" + op + "'"}};
  } catch (const std::exception& e) {
    return {{"error", e.what()}};
  }
}

}  // namespace comve::service
