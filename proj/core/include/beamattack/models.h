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

#ifndef BEAMATTACK_MODELS_H_
#define BEAMATTACK_MODELS_H_

#include <atomic>
#include <cstddef>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "beamattack/types.h"

namespace beamattack {

// The black-box classifier under attack. Implementations must be
// deterministic within a run and safe to call concurrently.
class TargetModel {
 public:
  virtual ~TargetModel() = default;
  virtual std::vector<ProbDist> Classify(
      std::span<const TextSequence> texts) const = 0;
  virtual LabelSet label_set() const = 0;
};

struct InfillProposal {
  std::string token;
  double prob = 0.0;

  bool operator==(const InfillProposal&) const = default;
};

// Masked-LM stand-in. Every returned prob must exceed min_prob.
class Infiller {
 public:
  virtual ~Infiller() = default;
  virtual std::vector<InfillProposal> Propose(const MaskedSequence& masked,
                                              double min_prob) const = 0;
};

// Text similarity in [0, 1], computed over the perturbable segments.
class Similarity {
 public:
  virtual ~Similarity() = default;
  virtual double Score(const TextSequence& a, const TextSequence& b) const = 0;
};

// Maps exact token sequences to fixed distributions; anything unmapped gets
// the default distribution.
class ScriptedOracle : public TargetModel {
 public:
  ScriptedOracle(LabelSet labels, ProbDist default_dist);

  // `text` is whitespace-normalized; pair texts join segments with " [SEP] ".
  void Set(std::string_view text, ProbDist dist);

  std::vector<ProbDist> Classify(
      std::span<const TextSequence> texts) const override;
  LabelSet label_set() const override { return labels_; }

 private:
  LabelSet labels_;
  ProbDist default_dist_;
  std::unordered_map<std::string, ProbDist> table_;
};

// softmax((bias + sum of keyword weights) / temperature) over all tokens of
// every segment.
class KeywordSoftmaxClassifier : public TargetModel {
 public:
  using WeightTable = std::unordered_map<std::string, double>;

  KeywordSoftmaxClassifier(LabelSet labels, std::vector<WeightTable> weights,
                           double temperature,
                           std::vector<double> bias = {});

  std::vector<ProbDist> Classify(
      std::span<const TextSequence> texts) const override;
  LabelSet label_set() const override { return labels_; }

  ProbDist ClassifyOne(const TextSequence& text) const;

 private:
  LabelSet labels_;
  std::vector<WeightTable> weights_;
  double temperature_;
  std::vector<double> bias_;
};

// Deterministic infiller driven by lookup tables. An exact masked-sequence
// entry wins; otherwise proposals are keyed by the token left of the mask, or
// "START" when the mask opens the segment.
class TableInfiller : public Infiller {
 public:
  static constexpr std::string_view kStartKey = "START";

  void SetExact(std::string_view masked_text,
                std::vector<InfillProposal> proposals);
  void SetContext(std::string_view left_token,
                  std::vector<InfillProposal> proposals);

  std::vector<InfillProposal> Propose(const MaskedSequence& masked,
                                      double min_prob) const override;

 private:
  std::unordered_map<std::string, std::vector<InfillProposal>> exact_;
  std::unordered_map<std::string, std::vector<InfillProposal>> context_;
};

// Multiset Jaccard overlap of the perturbable segments' tokens.
class JaccardSimilarity : public Similarity {
 public:
  double Score(const TextSequence& a, const TextSequence& b) const override;
};

using EmbeddingTable = std::unordered_map<std::string, std::vector<double>>;

struct CosineResult {
  double score = 0.0;
  // Both texts were entirely out of vocabulary.
  bool all_oov = false;
};

// Cosine of mean-pooled token vectors, clamped to [0, 1]. Out-of-vocabulary
// tokens contribute zero vectors.
CosineResult EmbeddingCosineSimilarity(const Tokens& a, const Tokens& b,
                                       const EmbeddingTable& table);

class EmbeddingSimilarity : public Similarity {
 public:
  explicit EmbeddingSimilarity(EmbeddingTable table);

  double Score(const TextSequence& a, const TextSequence& b) const override;

  // Number of calls that hit the all-OOV case.
  std::size_t oov_warnings() const { return oov_warnings_.load(); }

 private:
  EmbeddingTable table_;
  mutable std::atomic<std::size_t> oov_warnings_{0};
};

// Memoizes a deterministic target for one attack and accounts queries.
class CachingTarget : public TargetModel {
 public:
  explicit CachingTarget(const TargetModel& inner);

  std::vector<ProbDist> Classify(
      std::span<const TextSequence> texts) const override;
  LabelSet label_set() const override { return inner_.label_set(); }

  // Distinct sequences forwarded to the inner target.
  std::size_t unique_queries() const;
  // All sequences requested, cache hits included.
  std::size_t raw_queries() const;

 private:
  const TargetModel& inner_;
  mutable std::mutex mu_;
  mutable std::unordered_map<TextSequence, ProbDist, TextSequenceHash> cache_;
  mutable std::size_t raw_queries_ = 0;
};

// File loaders for the builtin backends. All throw DataError.
ScriptedOracle LoadScriptedOracle(const std::string& path);
ScriptedOracle ParseScriptedOracle(std::string_view json);
KeywordSoftmaxClassifier LoadKeywordClassifier(const std::string& path);
KeywordSoftmaxClassifier ParseKeywordClassifier(std::string_view json);
TableInfiller LoadTableInfiller(const std::string& path);
TableInfiller ParseTableInfiller(std::string_view json);
// Whitespace-separated text: one "word v1 v2 ... vd" entry per line.
EmbeddingTable LoadEmbeddingTable(const std::string& path);
EmbeddingTable ParseEmbeddingTable(std::string_view text);

}  // namespace beamattack

#endif  // BEAMATTACK_MODELS_H_
