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

#include "beamattack/actions.h"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_set>

#include "beamattack/errors.h"

namespace beamattack {
namespace {

void CheckPosition(const TextSequence& x, std::size_t position) {
  if (position < 1 || position > x.size()) {
    throw std::out_of_range("action position " + std::to_string(position) +
                            " outside 1.." + std::to_string(x.size()));
  }
}

bool IsUsableToken(std::string_view token) {
  if (token.empty() || token == kMaskToken) return false;
  return std::none_of(token.begin(), token.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c));
  });
}

}  // namespace

MaskedSequence MaskReplace(const TextSequence& x, std::size_t position) {
  CheckPosition(x, position);
  Tokens tokens = x.tokens();
  tokens[position - 1] = std::string(kMaskToken);
  return {std::move(tokens), position - 1, ActionKind::kReplace, position};
}

MaskedSequence MaskInsert(const TextSequence& x, std::size_t position) {
  CheckPosition(x, position);
  Tokens tokens = x.tokens();
  tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(position),
                std::string(kMaskToken));
  return {std::move(tokens), position, ActionKind::kInsert, position};
}

MaskedSequence MaskMerge(const TextSequence& x, std::size_t position) {
  CheckPosition(x, position);
  Tokens tokens = x.tokens();
  tokens[position - 1] = std::string(kMaskToken);
  if (position < x.size()) {
    tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(position));
  }
  return {std::move(tokens), position - 1, ActionKind::kMerge, position};
}

MaskedSequence MakeMask(const TextSequence& x, ActionKind kind,
                        std::size_t position) {
  switch (kind) {
    case ActionKind::kReplace:
      return MaskReplace(x, position);
    case ActionKind::kInsert:
      return MaskInsert(x, position);
    case ActionKind::kMerge:
      return MaskMerge(x, position);
  }
  throw std::invalid_argument("unknown action kind");
}

std::vector<MaskedSequence> EnumerateMasks(const TextSequence& x) {
  std::vector<MaskedSequence> masks;
  masks.reserve(3 * x.size());
  for (std::size_t i = 1; i <= x.size(); ++i) {
    masks.push_back(MaskReplace(x, i));
    masks.push_back(MaskInsert(x, i));
    masks.push_back(MaskMerge(x, i));
  }
  return masks;
}

Tokens Infill(const MaskedSequence& masked, std::string_view token) {
  Tokens tokens = masked.tokens;
  tokens.at(masked.mask_index) = std::string(token);
  return tokens;
}

TextSequence ApplyAction(const TextSequence& x, const ActionStep& step) {
  return x.WithTokens(Infill(MakeMask(x, step.kind, step.position), step.token));
}

std::vector<SubstituteProposal> SubstituteSet(const MaskedSequence& masked,
                                              const TextSequence& source,
                                              const TextSequence& original,
                                              const AttackConfig& config,
                                              const Infiller& infiller,
                                              const Similarity& similarity) {
  std::vector<SubstituteProposal> out;
  std::unordered_set<std::string> seen;
  for (auto& proposal : infiller.Propose(masked, config.alpha)) {
    if (!(proposal.prob > config.alpha) || proposal.prob > 1.0) continue;
    if (!IsUsableToken(proposal.token)) continue;
    if (masked.kind == ActionKind::kReplace &&
        proposal.token == source.tokens()[masked.origin_pos - 1]) {
      continue;
    }
    if (!seen.insert(proposal.token).second) continue;
    TextSequence candidate = source.WithTokens(Infill(masked, proposal.token));
    double sim = similarity.Score(candidate, original);
    if (!(sim > config.beta)) continue;
    out.push_back({std::move(proposal.token), proposal.prob, sim,
                   std::move(candidate)});
  }
  return out;
}

std::vector<Substitute> ClassifySubstitutes(
    std::vector<SubstituteProposal> proposals, std::size_t gold,
    ScoringMode mode, const TargetModel& target, std::size_t batch_size) {
  std::vector<Substitute> out;
  out.reserve(proposals.size());
  std::vector<TextSequence> batch;
  for (std::size_t start = 0; start < proposals.size(); start += batch_size) {
    std::size_t end = std::min(proposals.size(), start + batch_size);
    batch.clear();
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back(proposals[i].candidate);
    }
    std::vector<ProbDist> dists = target.Classify(batch);
    if (dists.size() != batch.size()) {
      throw ProtocolError("target returned wrong number of results");
    }
    for (std::size_t i = start; i < end; ++i) {
      ProbDist& dist = dists[i - start];
      double score = ActionScore(dist, gold, mode);
      out.push_back({std::move(proposals[i].token), proposals[i].mlm_prob,
                     proposals[i].similarity,
                     std::move(proposals[i].candidate), std::move(dist),
                     score});
    }
  }
  return out;
}

std::vector<Substitute> SelectSubstitutes(std::vector<Substitute> subs,
                                          std::size_t gold, std::size_t k,
                                          ScoringMode mode) {
  for (auto& s : subs) s.score = ActionScore(s.dist, gold, mode);
  auto less = [](const Substitute& a, const Substitute& b) {
    return std::tie(a.score, a.token) < std::tie(b.score, b.token);
  };
  std::size_t keep = std::min(k, subs.size());
  std::partial_sort(subs.begin(),
                    subs.begin() + static_cast<std::ptrdiff_t>(keep),
                    subs.end(), less);
  subs.erase(subs.begin() + static_cast<std::ptrdiff_t>(keep), subs.end());
  return subs;
}

bool ActionLess(const ScoredAction& a, const ScoredAction& b) {
  return std::make_tuple(a.score, a.step.position,
                         static_cast<int>(a.step.kind), a.substitute_rank) <
         std::make_tuple(b.score, b.step.position,
                         static_cast<int>(b.step.kind), b.substitute_rank);
}

ActionBatch ScoreAllActions(const TextSequence& source,
                            const TextSequence& original, std::size_t gold,
                            const AttackConfig& config,
                            const ModelSet& models) {
  const std::size_t k = config.EffectiveBeamSize();
  std::vector<ScoredAction> pool;
  for (const MaskedSequence& masked : EnumerateMasks(source)) {
    auto proposals = SubstituteSet(masked, source, original, config,
                                   models.infiller, models.similarity);
    if (proposals.empty()) continue;
    auto scored = ClassifySubstitutes(std::move(proposals), gold,
                                      config.scoring, models.target,
                                      config.batch_size);
    auto selected = SelectSubstitutes(std::move(scored), gold, k,
                                      config.scoring);
    for (std::size_t rank = 0; rank < selected.size(); ++rank) {
      Substitute& s = selected[rank];
      pool.push_back({ActionStep{masked.kind, masked.origin_pos, s.token},
                      s.score, std::move(s.candidate), std::move(s.dist),
                      s.similarity, rank});
    }
  }
  std::sort(pool.begin(), pool.end(), ActionLess);

  ActionBatch batch{source, {}};
  std::unordered_set<TextSequence, TextSequenceHash> seen;
  for (auto& action : pool) {
    if (seen.insert(action.candidate).second) {
      batch.actions.push_back(std::move(action));
    }
  }
  return batch;
}

ActionBatch GetBestActions(const TextSequence& source,
                           const TextSequence& original, std::size_t gold,
                           const AttackConfig& config, const ModelSet& models) {
  ActionBatch batch = ScoreAllActions(source, original, gold, config, models);
  if (batch.actions.size() > config.EffectiveBeamSize()) {
    batch.actions.erase(batch.actions.begin() +
                            static_cast<std::ptrdiff_t>(
                                config.EffectiveBeamSize()),
                        batch.actions.end());
  }
  return batch;
}

}  // namespace beamattack
