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

#ifndef BEAMATTACK_ACTIONS_H_
#define BEAMATTACK_ACTIONS_H_

#include <cstddef>
#include <string_view>
#include <vector>

#include "beamattack/models.h"
#include "beamattack/types.h"

namespace beamattack {

// The three black-box backends an attack talks to.
struct ModelSet {
  const TargetModel& target;
  const Infiller& infiller;
  const Similarity& similarity;
};

// Mask constructors. `position` is 1-based over the perturbable segment and
// must satisfy 1 <= position <= n; throws std::out_of_range otherwise.
MaskedSequence MaskReplace(const TextSequence& x, std::size_t position);
// Sentinel goes right after token `position`; position == n appends.
MaskedSequence MaskInsert(const TextSequence& x, std::size_t position);
// Replaces the bigram at (position, position + 1); at position == n only the
// last token is replaced.
MaskedSequence MaskMerge(const TextSequence& x, std::size_t position);
MaskedSequence MakeMask(const TextSequence& x, ActionKind kind,
                        std::size_t position);

// All 3n masks, position-major, R/I/M within a position.
std::vector<MaskedSequence> EnumerateMasks(const TextSequence& x);

// Fills the sentinel with `token`.
Tokens Infill(const MaskedSequence& masked, std::string_view token);

TextSequence ApplyAction(const TextSequence& x, const ActionStep& step);

// Infiller proposals for `masked` that clear both thresholds:
// mlm prob > alpha and sim(candidate, original) > beta. The sentinel itself,
// tokens containing whitespace, and no-op Replace substitutes are dropped.
// Order follows the infiller's proposal order.
std::vector<SubstituteProposal> SubstituteSet(const MaskedSequence& masked,
                                              const TextSequence& source,
                                              const TextSequence& original,
                                              const AttackConfig& config,
                                              const Infiller& infiller,
                                              const Similarity& similarity);

// Classifies every proposal (in chunks of `batch_size`) and attaches the
// target distribution and its score.
std::vector<Substitute> ClassifySubstitutes(
    std::vector<SubstituteProposal> proposals, std::size_t gold,
    ScoringMode mode, const TargetModel& target, std::size_t batch_size);

// The min(k, |subs|) substitutes with the smallest score under `mode`, ties
// broken by token. Scores are recomputed from each substitute's dist.
std::vector<Substitute> SelectSubstitutes(std::vector<Substitute> subs,
                                          std::size_t gold, std::size_t k,
                                          ScoringMode mode);

struct ActionBatch {
  TextSequence source;
  // Ascending by ActionLess; candidates are pairwise distinct.
  std::vector<ScoredAction> actions;
};

// Total order on actions of one source: score, position, kind, then the
// substitute's rank inside its mask.
bool ActionLess(const ScoredAction& a, const ScoredAction& b);

// Every action of `source`: up to k = config.EffectiveBeamSize() substitutes
// per mask, pooled over the 3n masks, sorted, with duplicate candidates
// collapsed onto the best-ranked action.
ActionBatch ScoreAllActions(const TextSequence& source,
                            const TextSequence& original, std::size_t gold,
                            const AttackConfig& config,
                            const ModelSet& models);

// ScoreAllActions truncated to the best k actions.
ActionBatch GetBestActions(const TextSequence& source,
                           const TextSequence& original, std::size_t gold,
                           const AttackConfig& config, const ModelSet& models);

}  // namespace beamattack

#endif  // BEAMATTACK_ACTIONS_H_
