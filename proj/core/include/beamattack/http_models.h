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

#ifndef BEAMATTACK_HTTP_MODELS_H_
#define BEAMATTACK_HTTP_MODELS_H_

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "beamattack/models.h"
#include "beamattack/types.h"

namespace beamattack {

// JSON-over-HTTP protocol spoken with the model server.
//
//   POST /classify    {"texts": [[segment, ...], ...]}
//                  -> {"probs": [[p, ...], ...], "labels": [name, ...]}
//   POST /infill      {"tokens": [...], "mask_index": j, "min_prob": a,
//                      "top_n": N}
//                  -> {"proposals": [[token, prob], ...]}
//   POST /similarity  {"pairs": [[text_a, text_b], ...]}
//                  -> {"scores": [s, ...]}
//   POST /perplexity  {"texts": [text, ...]} -> {"perplexities": [...]}
//   POST /grammar     {"texts": [text, ...]} -> {"errors": [...]}
//   GET  /healthz     -> {"status": "ok"}
//
// Errors come back as {"error": message} with a non-200 status.
namespace wire {

// Distributions within this distance of summing to one are renormalized.
inline constexpr double kRenormalizeTolerance = 1e-4;

std::string ClassifyRequest(std::span<const TextSequence> texts);
struct ClassifyResponse {
  std::vector<ProbDist> dists;
  std::vector<std::string> labels;
};
// Throws ProtocolError on malformed bodies, a label count that disagrees
// with `expected_labels` (when non-zero), or distributions that are off by
// more than kRenormalizeTolerance.
ClassifyResponse ParseClassifyResponse(std::string_view body,
                                       std::size_t expected_texts,
                                       std::size_t expected_labels);

std::string InfillRequest(const MaskedSequence& masked, double min_prob,
                          std::size_t top_n);
// Drops proposals at or below min_prob, the mask sentinel, multi-word and
// non-alphabetic tokens, and anything past top_n.
std::vector<InfillProposal> ParseInfillResponse(std::string_view body,
                                                double min_prob,
                                                std::size_t top_n);

std::string SimilarityRequest(
    std::span<const std::pair<std::string, std::string>> pairs);
std::vector<double> ParseSimilarityResponse(std::string_view body,
                                            std::size_t expected);

std::string TextsRequest(std::span<const std::string> texts);
// `field` is "perplexities" or "errors".
std::vector<double> ParseScoresResponse(std::string_view body,
                                        std::string_view field,
                                        std::size_t expected);

// Parses {"error": "..."} if present.
std::optional<std::string> ParseError(std::string_view body);

}  // namespace wire

struct HttpOptions {
  // Base URL, e.g. "http://127.0.0.1:8000" (a path prefix is allowed).
  std::string endpoint;
  int timeout_ms = 30000;
  int max_attempts = 3;
  int initial_backoff_ms = 100;
  // In-flight request bound shared by every call through one adapter.
  std::size_t connection_limit = 8;
  // Maximum texts per /classify request.
  std::size_t batch_limit = 64;
};

class HttpClient;

class HttpTarget : public TargetModel {
 public:
  explicit HttpTarget(HttpOptions options);
  ~HttpTarget() override;

  std::vector<ProbDist> Classify(
      std::span<const TextSequence> texts) const override;
  // Fetched once with an empty /classify request.
  LabelSet label_set() const override;

 private:
  std::unique_ptr<HttpClient> client_;
  std::size_t batch_limit_;
  mutable std::once_flag labels_once_;
  mutable std::optional<LabelSet> labels_;
};

class HttpInfiller : public Infiller {
 public:
  explicit HttpInfiller(HttpOptions options, std::size_t top_n = 50);
  ~HttpInfiller() override;

  std::vector<InfillProposal> Propose(const MaskedSequence& masked,
                                      double min_prob) const override;

 private:
  std::unique_ptr<HttpClient> client_;
  std::size_t top_n_;
};

class HttpSimilarity : public Similarity {
 public:
  explicit HttpSimilarity(HttpOptions options);
  ~HttpSimilarity() override;

  double Score(const TextSequence& a, const TextSequence& b) const override;

 private:
  std::unique_ptr<HttpClient> client_;
};

// Sentence-level scores delegated to a server (perplexity, grammar errors).
class TextScorer {
 public:
  virtual ~TextScorer() = default;
  // Throws BackendError when the scorer is unavailable.
  virtual std::vector<double> Score(
      std::span<const std::string> texts) const = 0;
};

class HttpTextScorer : public TextScorer {
 public:
  enum class Kind { kPerplexity, kGrammar };

  HttpTextScorer(HttpOptions options, Kind kind);
  ~HttpTextScorer() override;

  std::vector<double> Score(std::span<const std::string> texts) const override;

 private:
  std::unique_ptr<HttpClient> client_;
  Kind kind_;
};

// GET /healthz; true on {"status": "ok"}.
bool CheckHealth(const HttpOptions& options);

}  // namespace beamattack

#endif  // BEAMATTACK_HTTP_MODELS_H_
