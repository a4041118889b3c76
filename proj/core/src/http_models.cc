// Copyright 2026 The beamattack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "beamattack/http_models.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <semaphore>
#include <thread>

#include "beamattack/errors.h"
#include "httplib.h"
#include "json.hpp"

namespace beamattack {

using nlohmann::json;

namespace wire {
namespace {

json Parse(std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed response: ") + e.what());
  }
}

bool IsWordToken(std::string_view token) {
  if (token.empty() || token == kMaskToken) return false;
  return std::all_of(token.begin(), token.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    // Bytes >= 0x80 belong to non-ASCII letters; ASCII must be alphabetic.
    return u >= 0x80 || std::isalpha(u) || c == '\'' || c == '-';
  });
}

}  // namespace

std::string ClassifyRequest(std::span<const TextSequence> texts) {
  json items = json::array();
  for (const auto& text : texts) {
    json segments = json::array();
    for (std::size_t s = 0; s < text.segments().size(); ++s) {
      segments.push_back(text.SegmentText(s));
    }
    items.push_back(std::move(segments));
  }
  return json{{"texts", std::move(items)}}.dump();
}

ClassifyResponse ParseClassifyResponse(std::string_view body,
                                       std::size_t expected_texts,
                                       std::size_t expected_labels) {
  json doc = Parse(body);
  if (!doc.is_object() || !doc.contains("probs") || !doc["probs"].is_array()) {
    throw ProtocolError("classify response lacks a probs array");
  }
  ClassifyResponse out;
  try {
    if (doc.contains("labels")) {
      out.labels = doc["labels"].get<std::vector<std::string>>();
    }
    if (doc["probs"].size() != expected_texts) {
      throw ProtocolError("classify response has wrong number of texts");
    }
    for (const auto& row : doc["probs"]) {
      auto probs = row.get<std::vector<double>>();
      std::size_t want = expected_labels != 0 ? expected_labels
                                              : out.labels.size();
      if (probs.size() != want || probs.empty()) {
        throw ProtocolError("distribution length does not match label set");
      }
      double sum = 0.0;
      for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0 + kRenormalizeTolerance)) {
          throw ProtocolError("probability outside [0, 1]");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRenormalizeTolerance) {
        throw ProtocolError("distribution does not sum to 1");
      }
      for (double& p : probs) p = std::min(1.0, p / sum);
      out.dists.emplace_back(std::move(probs));
    }
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("classify response: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(std::string("classify response: ") + e.what());
  }
  return out;
}

std::string InfillRequest(const MaskedSequence& masked, double min_prob,
                          std::size_t top_n) {
  return json{{"tokens", masked.tokens},
              {"mask_index", masked.mask_index},
              {"min_prob", min_prob},
              {"top_n", top_n}}
      .dump();
}

std::vector<InfillProposal> ParseInfillResponse(std::string_view body,
                                                double min_prob,
                                                std::size_t top_n) {
  json doc = Parse(body);
  if (!doc.is_object() || !doc.contains("proposals") ||
      !doc["proposals"].is_array()) {
    throw ProtocolError("infill response lacks a proposals array");
  }
  std::vector<InfillProposal> out;
  try {
    for (const auto& item : doc["proposals"]) {
      if (!item.is_array() || item.size() != 2) {
        throw ProtocolError("proposal must be a [token, prob] pair");
      }
      InfillProposal p{item[0].get<std::string>(), item[1].get<double>()};
      if (!(p.prob > min_prob) || p.prob > 1.0) continue;
      if (!IsWordToken(p.token)) continue;
      out.push_back(std::move(p));
      if (out.size() == top_n) break;
    }
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("infill response: ") + e.what());
  }
  return out;
}

std::string SimilarityRequest(
    std::span<const std::pair<std::string, std::string>> pairs) {
  json items = json::array();
  for (const auto& [a, b] : pairs) items.push_back({a, b});
  return json{{"pairs", std::move(items)}}.dump();
}

std::vector<double> ParseSimilarityResponse(std::string_view body,
                                            std::size_t expected) {
  auto scores = ParseScoresResponse(body, "scores", expected);
  for (double s : scores) {
    if (!(s >= -1e-6 && s <= 1.0 + 1e-6)) {
      throw ProtocolError("similarity outside [0, 1]");
    }
  }
  for (double& s : scores) s = std::clamp(s, 0.0, 1.0);
  return scores;
}

std::string TextsRequest(std::span<const std::string> texts) {
  return json{{"texts", std::vector<std::string>(texts.begin(), texts.end())}}
      .dump();
}

std::vector<double> ParseScoresResponse(std::string_view body,
                                        std::string_view field,
                                        std::size_t expected) {
  json doc = Parse(body);
  std::string key(field);
  if (!doc.is_object() || !doc.contains(key) || !doc[key].is_array()) {
    throw ProtocolError("response lacks a " + key + " array");
  }
  std::vector<double> out;
  try {
    out = doc[key].get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ProtocolError(key + ": " + e.what());
  }
  if (out.size() != expected) {
    throw ProtocolError(key + ": wrong number of results");
  }
  return out;
}

std::optional<std::string> ParseError(std::string_view body) {
  try {
    json doc = json::parse(body);
    if (doc.is_object() && doc.contains("error") && doc["error"].is_string()) {
      return doc["error"].get<std::string>();
    }
  } catch (const json::exception&) {
  }
  return std::nullopt;
}

}  // namespace wire

// Bounded, retrying JSON POST client for one endpoint.
class HttpClient {
 public:
  explicit HttpClient(HttpOptions options)
      : options_(std::move(options)),
        slots_(static_cast<std::ptrdiff_t>(
            std::clamp<std::size_t>(options_.connection_limit, 1, 1024))) {
    const std::string& url = options_.endpoint;
    std::size_t scheme = url.find("://");
    std::size_t path_start =
        url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) {
      base_ = url;
    } else {
      base_ = url.substr(0, path_start);
      prefix_ = url.substr(path_start);
      while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }
  }

  const HttpOptions& options() const { return options_; }

  std::string Post(std::string_view route, const std::string& body) const {
    return Send(route, &body);
  }

  std::string Get(std::string_view route) const {
    return Send(route, nullptr);
  }

 private:
  std::string Send(std::string_view route, const std::string* body) const {
    std::string path = prefix_ + std::string(route);
    std::string last_error;
    int backoff = options_.initial_backoff_ms;
    for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
      if (attempt > 1) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
        backoff *= 2;
      }
      slots_.acquire();
      httplib::Result result = [&] {
        httplib::Client client(base_);
        auto timeout = std::chrono::milliseconds(options_.timeout_ms);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        return body != nullptr
                   ? client.Post(path, *body, "application/json")
                   : client.Get(path);
      }();
      slots_.release();

      if (!result) {
        last_error = "request to " + base_ + path +
                     " failed: " + httplib::to_string(result.error());
        continue;
      }
      if (result->status == 200) return result->body;
      std::string message = wire::ParseError(result->body)
                                .value_or("HTTP " + std::to_string(
                                                        result->status));
      last_error = base_ + path + ": " + message;
      // Client-side faults and unimplemented endpoints are not retried.
      if (result->status < 500 || result->status == 501) break;
    }
    throw BackendError(last_error);
  }

  HttpOptions options_;
  std::string base_;
  std::string prefix_;
  mutable std::counting_semaphore<1024> slots_;
};

HttpTarget::HttpTarget(HttpOptions options)
    : client_(std::make_unique<HttpClient>(options)),
      batch_limit_(std::max<std::size_t>(1, options.batch_limit)) {}

HttpTarget::~HttpTarget() = default;

LabelSet HttpTarget::label_set() const {
  std::call_once(labels_once_, [this] {
    std::vector<TextSequence> none;
    auto body = client_->Post("/classify", wire::ClassifyRequest(none));
    auto response = wire::ParseClassifyResponse(body, 0, 0);
    try {
      labels_.emplace(response.labels);
    } catch (const std::invalid_argument& e) {
      throw ProtocolError(std::string("classify labels: ") + e.what());
    }
  });
  if (!labels_) throw BackendError("label set unavailable");
  return *labels_;
}

std::vector<ProbDist> HttpTarget::Classify(
    std::span<const TextSequence> texts) const {
  const std::size_t num_labels = label_set().size();
  std::vector<ProbDist> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += batch_limit_) {
    auto chunk = texts.subspan(start,
                               std::min(batch_limit_, texts.size() - start));
    auto body = client_->Post("/classify", wire::ClassifyRequest(chunk));
    auto response =
        wire::ParseClassifyResponse(body, chunk.size(), num_labels);
    for (auto& d : response.dists) out.push_back(std::move(d));
  }
  return out;
}

HttpInfiller::HttpInfiller(HttpOptions options, std::size_t top_n)
    : client_(std::make_unique<HttpClient>(std::move(options))),
      top_n_(top_n) {}

HttpInfiller::~HttpInfiller() = default;

std::vector<InfillProposal> HttpInfiller::Propose(const MaskedSequence& masked,
                                                  double min_prob) const {
  auto body =
      client_->Post("/infill", wire::InfillRequest(masked, min_prob, top_n_));
  return wire::ParseInfillResponse(body, min_prob, top_n_);
}

HttpSimilarity::HttpSimilarity(HttpOptions options)
    : client_(std::make_unique<HttpClient>(std::move(options))) {}

HttpSimilarity::~HttpSimilarity() = default;

double HttpSimilarity::Score(const TextSequence& a,
                             const TextSequence& b) const {
  std::vector<std::pair<std::string, std::string>> pairs{
      {JoinTokens(a.tokens()), JoinTokens(b.tokens())}};
  auto body = client_->Post("/similarity", wire::SimilarityRequest(pairs));
  return wire::ParseSimilarityResponse(body, 1).front();
}

HttpTextScorer::HttpTextScorer(HttpOptions options, Kind kind)
    : client_(std::make_unique<HttpClient>(std::move(options))), kind_(kind) {}

HttpTextScorer::~HttpTextScorer() = default;

std::vector<double> HttpTextScorer::Score(
    std::span<const std::string> texts) const {
  const bool ppl = kind_ == Kind::kPerplexity;
  auto body = client_->Post(ppl ? "/perplexity" : "/grammar",
                            wire::TextsRequest(texts));
  return wire::ParseScoresResponse(body, ppl ? "perplexities" : "errors",
                                   texts.size());
}

bool CheckHealth(const HttpOptions& options) {
  HttpOptions once = options;
  once.max_attempts = 1;
  try {
    json doc = json::parse(HttpClient(once).Get("/healthz"));
    return doc.value("status", "") == "ok";
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace beamattack
