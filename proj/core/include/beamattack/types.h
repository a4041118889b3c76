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

#ifndef BEAMATTACK_TYPES_H_
#define BEAMATTACK_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace beamattack {

// Mask sentinel, both in memory and on the wire.
inline constexpr std::string_view kMaskToken = "<mask>";
// Joins the segments of a pair task when a whole sequence is rendered as text.
inline constexpr std::string_view kSegmentSeparator = "[SEP]";

using Tokens = std::vector<std::string>;

// Splits on ASCII whitespace; runs of whitespace produce no empty tokens.
Tokens Tokenize(std::string_view text);
std::string JoinTokens(const Tokens& tokens);

// Ordered, unique class label names. Index of a label is stable for a run.
class LabelSet {
 public:
  // Throws std::invalid_argument if fewer than two labels or duplicates.
  explicit LabelSet(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::string& name(std::size_t index) const { return labels_.at(index); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<std::size_t> IndexOf(std::string_view name) const;

  bool operator==(const LabelSet&) const = default;

 private:
  std::vector<std::string> labels_;
};

// A categorical distribution over the label set, as returned by a target.
class ProbDist {
 public:
  static constexpr double kSumTolerance = 1e-6;

  // Throws std::invalid_argument on empty input, values outside [0, 1] or a
  // sum further than kSumTolerance from 1.
  explicit ProbDist(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& values() const { return probs_; }

  // Index of the largest probability; ties go to the lowest index.
  std::size_t Argmax() const;

  bool operator==(const ProbDist&) const = default;

 private:
  std::vector<double> probs_;
};

// Word-level text with one or two segments. Only the perturbable segment is
// ever modified by an attack.
class TextSequence {
 public:
  // Throws std::invalid_argument on 0 or >2 segments, an empty segment, or an
  // out-of-range perturbable index.
  explicit TextSequence(std::vector<Tokens> segments,
                        std::size_t perturbable = 0);

  static TextSequence FromText(std::string_view text);

  const std::vector<Tokens>& segments() const { return segments_; }
  std::size_t perturbable() const { return perturbable_; }
  const Tokens& tokens() const { return segments_[perturbable_]; }
  // Token count n of the perturbable segment.
  std::size_t size() const { return tokens().size(); }

  // Copy with the perturbable segment replaced.
  TextSequence WithTokens(Tokens tokens) const;

  std::string SegmentText(std::size_t segment) const;
  // All segments, joined by kSegmentSeparator.
  std::string Text() const;

  bool operator==(const TextSequence&) const = default;

 private:
  std::vector<Tokens> segments_;
  std::size_t perturbable_ = 0;
};

struct TextSequenceHash {
  std::size_t operator()(const TextSequence& text) const;
};

struct Instance {
  std::string id;
  TextSequence text;
  std::size_t gold = 0;
};

// Declaration order is the tie-break order R < I < M.
enum class ActionKind { kReplace = 0, kInsert = 1, kMerge = 2 };

std::string_view ToString(ActionKind kind);
// Accepts "replace" / "insert" / "merge". Throws std::invalid_argument.
ActionKind ParseActionKind(std::string_view name);

struct MaskedSequence {
  Tokens tokens;
  std::size_t mask_index = 0;  // 0-based position j of the sentinel
  ActionKind kind = ActionKind::kReplace;
  std::size_t origin_pos = 1;  // 1-based position i in the source sequence
};

enum class ScoringMode { kProbDiff, kGoldProb };
enum class SearchMode { kBeam, kGreedy };

std::string_view ToString(ScoringMode mode);
std::string_view ToString(SearchMode mode);
// Accepts "prob_diff"/"prob-diff" and "gold_prob"/"gold-prob".
ScoringMode ParseScoringMode(std::string_view name);
SearchMode ParseSearchMode(std::string_view name);

// p[gold] - max_{j != gold} p[j], in [-1, 1]. Negative iff the target is
// fooled, up to exact ties. Throws std::invalid_argument if the distribution
// has fewer than two labels or gold is out of range.
double ProbabilityDifference(const ProbDist& dist, std::size_t gold);

// argmax(dist) != gold with argmax ties broken to the lowest index.
bool IsFooled(const ProbDist& dist, std::size_t gold);

double GoldProbability(const ProbDist& dist, std::size_t gold);

// Lower is better under both modes.
double ActionScore(const ProbDist& dist, std::size_t gold, ScoringMode mode);

// A single (kind, position, token) perturbation.
struct ActionStep {
  ActionKind kind = ActionKind::kReplace;
  std::size_t position = 1;  // 1-based
  std::string token;

  bool operator==(const ActionStep&) const = default;
};

// Infiller proposal that survived the alpha and beta filters, not yet
// classified by the target.
struct SubstituteProposal {
  std::string token;
  double mlm_prob = 0.0;
  double similarity = 0.0;
  TextSequence candidate;
};

struct Substitute {
  std::string token;
  double mlm_prob = 0.0;
  double similarity = 0.0;
  TextSequence candidate;
  ProbDist dist;
  double score = 0.0;
};

struct ScoredAction {
  ActionStep step;
  double score = 0.0;
  TextSequence candidate;
  ProbDist dist;
  double similarity = 0.0;
  // Rank of the substitute within its mask's selection.
  std::size_t substitute_rank = 0;
};

struct AttackConfig {
  std::size_t beam_size = 10;
  std::size_t max_iters = 10;
  double alpha = 5e-3;
  double beta = 0.7;
  // Success similarity bar; defaults to beta when unset.
  std::optional<double> epsilon;
  ScoringMode scoring = ScoringMode::kProbDiff;
  SearchMode search = SearchMode::kBeam;
  std::uint64_t seed = 0;
  // Maximum candidates per classify call.
  std::size_t batch_size = 64;

  double Epsilon() const { return epsilon.value_or(beta); }
  // 1 in greedy mode regardless of beam_size.
  std::size_t EffectiveBeamSize() const {
    return search == SearchMode::kGreedy ? 1 : beam_size;
  }
  // Throws ConfigError.
  void Validate() const;
};

enum class AttackStatus {
  kSuccess,
  kFailed,
  kSkippedMisclassified,
  kSearchExhausted,
  kBackendError,
};

std::string_view ToString(AttackStatus status);
AttackStatus ParseAttackStatus(std::string_view name);

struct AttackRecord {
  std::string id;
  std::size_t gold = 0;
  AttackStatus status = AttackStatus::kFailed;
  TextSequence original;
  std::optional<TextSequence> adversarial{};
  // For failures: the path of the best final beam entry.
  std::vector<ActionStep> path{};
  std::size_t iterations = 0;
  // Unique sequences sent to the target.
  std::size_t query_count = 0;
  // Every classification requested, including cache hits.
  std::size_t raw_query_count = 0;
  std::optional<ProbDist> final_dist{};
  std::optional<double> similarity{};
  std::string error{};

  bool success() const { return status == AttackStatus::kSuccess; }
  // Skipped records do not count as attacked.
  bool attacked() const {
    return status != AttackStatus::kSkippedMisclassified;
  }

  bool operator==(const AttackRecord&) const = default;
};

}  // namespace beamattack

#endif  // BEAMATTACK_TYPES_H_
