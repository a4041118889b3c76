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

#ifndef BEAMATTACK_SEARCH_H_
#define BEAMATTACK_SEARCH_H_

#include <cstddef>
#include <vector>

#include "beamattack/actions.h"
#include "beamattack/types.h"

namespace beamattack {

struct BeamEntry {
  TextSequence text;
  std::vector<ActionStep> path;
  double score = 0.0;
  ProbDist dist;
  double similarity = 1.0;
};

// Beam after iteration `iteration`: at most K entries, distinct texts, every
// path of length `iteration`, ascending by score.
struct BeamState {
  std::size_t iteration = 0;
  std::vector<BeamEntry> entries;
};

// Optional observer for tests and diagnostics.
struct AttackTrace {
  std::vector<BeamState> states;
};

// Probability-difference (or gold-probability) guided beam search.
//
// Iteration 1 expands only the original text; later iterations pool the best
// K actions of every beam entry (at most K^2), sort them ascending by score
// and apply the best K in order. The first applied candidate that fools the
// target with sim(candidate, original) >= epsilon is returned as the
// adversarial example. Backend failures are reported through the record
// status, never thrown.
AttackRecord Attack(const Instance& instance, const AttackConfig& config,
                    const ModelSet& models, AttackTrace* trace = nullptr);

// Attack with beam size 1.
AttackRecord AttackGreedy(const Instance& instance, const AttackConfig& config,
                          const ModelSet& models);

struct ExhaustiveLimits {
  std::size_t max_tokens = 6;
  std::size_t max_substitutes_per_mask = 4;
  std::size_t max_iters = 3;
};

// Breadth-first enumeration of every action sequence up to max_iters under
// the same alpha / beta / epsilon filters; returns a success of minimal path
// length when one exists. Only meant as a verification oracle on tiny
// inputs: throws std::invalid_argument when the instance or config exceeds
// `limits`.
AttackRecord ExhaustiveAttack(const Instance& instance,
                              const AttackConfig& config,
                              const ModelSet& models,
                              const ExhaustiveLimits& limits = {});

}  // namespace beamattack

#endif  // BEAMATTACK_SEARCH_H_
