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

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "beamattack/actions.h"
#include "beamattack/models.h"
#include "beamattack/search.h"

namespace beamattack {
namespace {

// Three-class keyword model with a context-keyed infiller over a small
// vocabulary. Every text has `tokens` words.
struct Workload {
  explicit Workload(std::size_t tokens, std::uint32_t seed = 1)
      : target(MakeTarget()), infiller(MakeInfiller()) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> filler(0, 39);
    std::uniform_int_distribution<int> cue(0, 7);
    for (int i = 0; i < 16; ++i) {
      Tokens words;
      for (std::size_t t = 0; t < tokens; ++t) {
        words.push_back(t % 4 == 0 ? "pos" + std::to_string(cue(rng))
                                   : "f" + std::to_string(filler(rng)));
      }
      texts.push_back(TextSequence({words}));
    }
  }

  static KeywordSoftmaxClassifier MakeTarget() {
    std::vector<KeywordSoftmaxClassifier::WeightTable> weights(3);
    const char* names[] = {"neg", "neu", "pos"};
    for (int c = 0; c < 3; ++c) {
      for (int i = 0; i < 8; ++i) {
        weights[c][names[c] + std::to_string(i)] = 0.8 + 0.1 * i;
      }
    }
    return KeywordSoftmaxClassifier(LabelSet({"neg", "neu", "pos"}), weights,
                                    1.0);
  }

  static TableInfiller MakeInfiller() {
    TableInfiller infiller;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> prob(0.01, 0.3);
    std::vector<std::string> keys = {std::string(TableInfiller::kStartKey)};
    for (int i = 0; i < 40; ++i) keys.push_back("f" + std::to_string(i));
    for (const char* c : {"neg", "neu", "pos"}) {
      for (int i = 0; i < 8; ++i) keys.push_back(c + std::to_string(i));
    }
    std::uniform_int_distribution<std::size_t> pick(1, keys.size() - 1);
    for (const auto& key : keys) {
      std::vector<InfillProposal> proposals;
      for (int j = 0; j < 8; ++j) proposals.push_back({keys[pick(rng)], prob(rng)});
      infiller.SetContext(key, proposals);
    }
    return infiller;
  }

  ModelSet models() const { return {target, infiller, similarity}; }

  KeywordSoftmaxClassifier target;
  TableInfiller infiller;
  JaccardSimilarity similarity;
  std::vector<TextSequence> texts;
};

void BM_EnumerateMasks(benchmark::State& state) {
  Workload w(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(EnumerateMasks(w.texts[0]));
  }
}
BENCHMARK(BM_EnumerateMasks)->Arg(10)->Arg(20)->Arg(40);

void BM_GetBestActions(benchmark::State& state) {
  Workload w(static_cast<std::size_t>(state.range(0)));
  AttackConfig config;
  config.beta = 0.5;
  config.beam_size = 10;
  for (auto _ : state) {
    for (const auto& x : w.texts) {
      benchmark::DoNotOptimize(GetBestActions(x, x, 2, config, w.models()));
    }
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(w.texts.size()));
}
BENCHMARK(BM_GetBestActions)->Arg(10)->Arg(20)->Arg(40);

void BM_Attack(benchmark::State& state) {
  Workload w(20);
  AttackConfig config;
  config.beta = 0.5;
  config.beam_size = static_cast<std::size_t>(state.range(0));
  config.max_iters = 5;
  std::size_t queries = 0;
  for (auto _ : state) {
    for (std::size_t i = 0; i < w.texts.size(); ++i) {
      Instance inst{std::to_string(i), w.texts[i], 2};
      AttackRecord r = Attack(inst, config, w.models());
      queries += r.query_count;
      benchmark::DoNotOptimize(r);
    }
  }
  state.counters["queries/attack"] = benchmark::Counter(
      static_cast<double>(queries) /
      static_cast<double>(state.iterations() * w.texts.size()));
}
BENCHMARK(BM_Attack)->Arg(1)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_CachingTargetHits(benchmark::State& state) {
  Workload w(20);
  CachingTarget cache(w.target);
  cache.Classify(w.texts);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cache.Classify(w.texts));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(w.texts.size()));
}
BENCHMARK(BM_CachingTargetHits);

}  // namespace
}  // namespace beamattack

BENCHMARK_MAIN();
