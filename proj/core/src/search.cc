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

#include "beamattack/search.h"

#include <algorithm>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include "beamattack/errors.h"

namespace beamattack {
namespace {

struct PooledAction {
  ScoredAction action;
  std::size_t parent = 0;
};

bool PooledLess(const PooledAction& a, const PooledAction& b) {
  const ScoredAction& x = a.action;
  const ScoredAction& y = b.action;
  return std::make_tuple(x.score, a.parent, x.step.position,
                         static_cast<int>(x.step.kind), x.substitute_rank) <
         std::make_tuple(y.score, b.parent, y.step.position,
                         static_cast<int>(y.step.kind), y.substitute_rank);
}

AttackRecord StartRecord(const Instance& instance) {
  AttackRecord record{.id = instance.id,
                      .gold = instance.gold,
                      .original = instance.text};
  return record;
}

void FinishCounts(AttackRecord& record, const CachingTarget& target) {
  record.query_count = target.unique_queries();
  record.raw_query_count = target.raw_queries();
}

ProbDist ClassifyOne(const TargetModel& target, const TextSequence& text) {
  std::vector<TextSequence> batch{text};
  auto dists = target.Classify(batch);
  if (dists.size() != 1) {
    throw ProtocolError("target returned wrong number of distributions");
  }
  return std::move(dists.front());
}

void Succeed(AttackRecord& record, const BeamEntry& entry,
             std::size_t iteration) {
  record.status = AttackStatus::kSuccess;
  record.adversarial = entry.text;
  record.path = entry.path;
  record.iterations = iteration;
  record.final_dist = entry.dist;
  record.similarity = entry.similarity;
}

void Fail(AttackRecord& record, AttackStatus status,
          const std::vector<BeamEntry>& beam, std::size_t iteration) {
  record.status = status;
  record.iterations = iteration;
  if (!beam.empty()) {
    record.path = beam.front().path;
    record.final_dist = beam.front().dist;
    record.similarity = beam.front().similarity;
  }
}

}  // namespace

AttackRecord Attack(const Instance& instance, const AttackConfig& config,
                    const ModelSet& models, AttackTrace* trace) {
  config.Validate();
  AttackRecord record = StartRecord(instance);
  CachingTarget target(models.target);
  ModelSet counted{target, models.infiller, models.similarity};
  const TextSequence& original = instance.text;
  const std::size_t beam_size = config.EffectiveBeamSize();
  const double epsilon = config.Epsilon();

  try {
    ProbDist initial = ClassifyOne(target, original);
    if (IsFooled(initial, instance.gold)) {
      record.status = AttackStatus::kSkippedMisclassified;
      record.final_dist = initial;
      FinishCounts(record, target);
      return record;
    }

    std::vector<BeamEntry> beam{
        {original, {}, ActionScore(initial, instance.gold, config.scoring),
         initial, 1.0}};
    for (std::size_t t = 1; t <= config.max_iters; ++t) {
      std::vector<PooledAction> pool;
      for (std::size_t parent = 0; parent < beam.size(); ++parent) {
        ActionBatch batch = GetBestActions(beam[parent].text, original,
                                           instance.gold, config, counted);
        for (auto& action : batch.actions) {
          pool.push_back({std::move(action), parent});
        }
      }
      if (pool.empty()) {
        Fail(record, AttackStatus::kSearchExhausted, beam, t);
        FinishCounts(record, target);
        return record;
      }
      std::sort(pool.begin(), pool.end(), PooledLess);

      std::vector<BeamEntry> next;
      std::unordered_set<TextSequence, TextSequenceHash> seen;
      for (auto& pooled : pool) {
        if (next.size() == beam_size) break;
        ScoredAction& action = pooled.action;
        if (!seen.insert(action.candidate).second) continue;

        BeamEntry entry{std::move(action.candidate), beam[pooled.parent].path,
                        action.score, std::move(action.dist),
                        action.similarity};
        entry.path.push_back(action.step);
        // The candidate was already scored; the cache answers this query.
        entry.dist = ClassifyOne(target, entry.text);
        if (IsFooled(entry.dist, instance.gold) &&
            entry.similarity >= epsilon) {
          Succeed(record, entry, t);
          FinishCounts(record, target);
          return record;
        }
        next.push_back(std::move(entry));
      }
      beam = std::move(next);
      if (trace != nullptr) trace->states.push_back({t, beam});
    }
    Fail(record, AttackStatus::kFailed, beam, config.max_iters);
  } catch (const BackendError& e) {
    record = StartRecord(instance);
    record.status = AttackStatus::kBackendError;
    record.error = e.what();
  }
  FinishCounts(record, target);
  return record;
}

AttackRecord AttackGreedy(const Instance& instance, const AttackConfig& config,
                          const ModelSet& models) {
  AttackConfig greedy = config;
  greedy.search = SearchMode::kGreedy;
  greedy.beam_size = 1;
  return Attack(instance, greedy, models);
}

AttackRecord ExhaustiveAttack(const Instance& instance,
                              const AttackConfig& config,
                              const ModelSet& models,
                              const ExhaustiveLimits& limits) {
  config.Validate();
  if (instance.text.size() > limits.max_tokens) {
    throw std::invalid_argument("exhaustive attack: text too long");
  }
  if (config.max_iters > limits.max_iters) {
    throw std::invalid_argument("exhaustive attack: too many iterations");
  }
  AttackRecord record = StartRecord(instance);
  CachingTarget target(models.target);
  const TextSequence& original = instance.text;
  const double epsilon = config.Epsilon();

  ProbDist initial = ClassifyOne(target, original);
  if (IsFooled(initial, instance.gold)) {
    record.status = AttackStatus::kSkippedMisclassified;
    record.final_dist = initial;
    FinishCounts(record, target);
    return record;
  }

  struct Node {
    TextSequence text;
    std::vector<ActionStep> path;
  };
  std::vector<Node> frontier{{original, {}}};
  std::unordered_set<TextSequence, TextSequenceHash> visited{original};
  for (std::size_t depth = 1; depth <= config.max_iters; ++depth) {
    std::vector<Node> next;
    for (const Node& node : frontier) {
      for (const MaskedSequence& masked : EnumerateMasks(node.text)) {
        auto proposals = SubstituteSet(masked, node.text, original, config,
                                       models.infiller, models.similarity);
        if (proposals.size() > limits.max_substitutes_per_mask) {
          throw std::invalid_argument(
              "exhaustive attack: substitute set too large");
        }
        if (proposals.empty()) continue;
        auto subs = ClassifySubstitutes(std::move(proposals), instance.gold,
                                        config.scoring, target,
                                        config.batch_size);
        for (auto& s : subs) {
          if (!visited.insert(s.candidate).second) continue;
          Node child{std::move(s.candidate), node.path};
          child.path.push_back({masked.kind, masked.origin_pos, s.token});
          if (IsFooled(s.dist, instance.gold) && s.similarity >= epsilon) {
            Succeed(record,
                    BeamEntry{child.text, child.path, s.score, s.dist,
                              s.similarity},
                    depth);
            FinishCounts(record, target);
            return record;
          }
          next.push_back(std::move(child));
        }
      }
    }
    record.iterations = depth;
    if (next.empty()) break;
    frontier = std::move(next);
  }
  record.status = AttackStatus::kFailed;
  FinishCounts(record, target);
  return record;
}

}  // namespace beamattack
