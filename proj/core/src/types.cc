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

#include "beamattack/types.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_set>

#include "beamattack/errors.h"

namespace beamattack {

Tokens Tokenize(std::string_view text) {
  Tokens tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() &&
           std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    std::size_t start = i;
    while (i < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string JoinTokens(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

LabelSet::LabelSet(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  if (labels_.size() < 2) {
    throw std::invalid_argument("label set needs at least two labels");
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : labels_) {
    if (!seen.insert(label).second) {
      throw std::invalid_argument("duplicate label: " + label);
    }
  }
}

std::optional<std::size_t> LabelSet::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == name) return i;
  }
  return std::nullopt;
}

ProbDist::ProbDist(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("empty distribution");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("probability outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("probabilities do not sum to 1");
  }
}

std::size_t ProbDist::Argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs_.size(); ++i) {
    if (probs_[i] > probs_[best]) best = i;
  }
  return best;
}

TextSequence::TextSequence(std::vector<Tokens> segments,
                           std::size_t perturbable)
    : segments_(std::move(segments)), perturbable_(perturbable) {
  if (segments_.empty() || segments_.size() > 2) {
    throw std::invalid_argument("text needs one or two segments");
  }
  for (const auto& segment : segments_) {
    if (segment.empty()) throw std::invalid_argument("empty text segment");
  }
  if (perturbable_ >= segments_.size()) {
    throw std::invalid_argument("perturbable segment index out of range");
  }
}

TextSequence TextSequence::FromText(std::string_view text) {
  return TextSequence({Tokenize(text)});
}

TextSequence TextSequence::WithTokens(Tokens tokens) const {
  std::vector<Tokens> segments = segments_;
  segments[perturbable_] = std::move(tokens);
  return TextSequence(std::move(segments), perturbable_);
}

std::string TextSequence::SegmentText(std::size_t segment) const {
  return JoinTokens(segments_.at(segment));
}

std::string TextSequence::Text() const {
  std::string out;
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    if (s > 0) {
      out += ' ';
      out += kSegmentSeparator;
      out += ' ';
    }
    out += JoinTokens(segments_[s]);
  }
  return out;
}

std::size_t TextSequenceHash::operator()(const TextSequence& text) const {
  std::size_t h = std::hash<std::size_t>{}(text.perturbable());
  std::hash<std::string> hasher;
  for (const auto& segment : text.segments()) {
    for (const auto& token : segment) {
      h ^= hasher(token) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    h = h * 31 + segment.size();
  }
  return h;
}

std::string_view ToString(ActionKind kind) {
  switch (kind) {
    case ActionKind::kReplace:
      return "replace";
    case ActionKind::kInsert:
      return "insert";
    case ActionKind::kMerge:
      return "merge";
  }
  return "unknown";
}

ActionKind ParseActionKind(std::string_view name) {
  if (name == "replace") return ActionKind::kReplace;
  if (name == "insert") return ActionKind::kInsert;
  if (name == "merge") return ActionKind::kMerge;
  throw std::invalid_argument("unknown action kind: " + std::string(name));
}

std::string_view ToString(ScoringMode mode) {
  return mode == ScoringMode::kProbDiff ? "prob_diff" : "gold_prob";
}

std::string_view ToString(SearchMode mode) {
  return mode == SearchMode::kBeam ? "beam" : "greedy";
}

ScoringMode ParseScoringMode(std::string_view name) {
  if (name == "prob_diff" || name == "prob-diff") return ScoringMode::kProbDiff;
  if (name == "gold_prob" || name == "gold-prob") return ScoringMode::kGoldProb;
  throw ConfigError("unknown scoring mode: " + std::string(name));
}

SearchMode ParseSearchMode(std::string_view name) {
  if (name == "beam") return SearchMode::kBeam;
  if (name == "greedy") return SearchMode::kGreedy;
  throw ConfigError("unknown search mode: " + std::string(name));
}

double ProbabilityDifference(const ProbDist& dist, std::size_t gold) {
  if (dist.size() < 2) {
    throw std::invalid_argument("invalid label set: fewer than two labels");
  }
  if (gold >= dist.size()) throw std::invalid_argument("gold out of range");
  double best_other = -1.0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (j != gold) best_other = std::max(best_other, dist[j]);
  }
  return dist[gold] - best_other;
}

bool IsFooled(const ProbDist& dist, std::size_t gold) {
  return dist.Argmax() != gold;
}

double GoldProbability(const ProbDist& dist, std::size_t gold) {
  if (gold >= dist.size()) throw std::invalid_argument("gold out of range");
  return dist[gold];
}

double ActionScore(const ProbDist& dist, std::size_t gold, ScoringMode mode) {
  return mode == ScoringMode::kProbDiff ? ProbabilityDifference(dist, gold)
                                        : GoldProbability(dist, gold);
}

void AttackConfig::Validate() const {
  if (beam_size < 1) throw ConfigError("beam_size must be positive");
  if (max_iters < 1) throw ConfigError("max_iters must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1)");
  }
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw ConfigError("beta must lie in (0, 1]");
  }
  if (Epsilon() < beta) throw ConfigError("epsilon must be >= beta");
  if (Epsilon() > 1.0) throw ConfigError("epsilon must be <= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
}

std::string_view ToString(AttackStatus status) {
  switch (status) {
    case AttackStatus::kSuccess:
      return "success";
    case AttackStatus::kFailed:
      return "failed";
    case AttackStatus::kSkippedMisclassified:
      return "skipped_misclassified";
    case AttackStatus::kSearchExhausted:
      return "search_exhausted";
    case AttackStatus::kBackendError:
      return "backend_error";
  }
  return "unknown";
}

AttackStatus ParseAttackStatus(std::string_view name) {
  for (auto status :
       {AttackStatus::kSuccess, AttackStatus::kFailed,
        AttackStatus::kSkippedMisclassified, AttackStatus::kSearchExhausted,
        AttackStatus::kBackendError}) {
    if (ToString(status) == name) return status;
  }
  throw DataError("unknown attack status: " + std::string(name));
}

}  // namespace beamattack
