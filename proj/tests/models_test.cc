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

#include "beamattack/models.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "beamattack/actions.h"
#include "beamattack/errors.h"
#include "testing/toy_world.h"

namespace beamattack {
namespace {

TextSequence Text(std::string_view s) { return TextSequence::FromText(s); }

TEST(ScriptedOracleTest, LooksUpNormalizedTextElseDefault) {
  ScriptedOracle oracle(LabelSet({"a", "b"}), ProbDist({0.5, 0.5}));
  oracle.Set("  x   y ", ProbDist({0.9, 0.1}));
  auto out = oracle.Classify(std::vector{Text("x y"), Text("z")});
  EXPECT_EQ(out[0].values(), (std::vector<double>{0.9, 0.1}));
  EXPECT_EQ(out[1].values(), (std::vector<double>{0.5, 0.5}));
}

TEST(ScriptedOracleTest, ParseRejectsWrongLength) {
  EXPECT_THROW(ParseScriptedOracle(R"({"labels": ["a", "b"],
                                      "default": [0.2, 0.3, 0.5]})"),
               DataError);
  EXPECT_THROW(ParseScriptedOracle("not json"), DataError);
  EXPECT_THROW(LoadScriptedOracle("/nonexistent/oracle.json"), DataError);
}

TEST(ScriptedOracleTest, MovieReviewFixtureValues) {
  ScriptedOracle oracle =
      LoadScriptedOracle(BEAMATTACK_FIXTURE_DIR "/movie_review/oracle.json");
  EXPECT_EQ(oracle.label_set().labels(),
            (std::vector<std::string>{"y1", "y2", "y3"}));
  auto d = oracle.Classify(std::vector{Text("the movie is great")});
  EXPECT_NEAR(ProbabilityDifference(d[0], 1), 0.44, 1e-12);
}

TEST(KeywordClassifierTest, HandComputedSoftmax) {
  auto clf = ParseKeywordClassifier(R"({
    "labels": ["neg", "pos"],
    "weights": {"pos": {"good": 2.0}, "neg": {"bad": 1.0}},
    "bias": {"neg": 0.5},
    "temperature": 2.0})");
  // logits: neg = 0.5 + 1.0, pos = 2.0; divided by 2.
  ProbDist d = clf.ClassifyOne(Text("good bad"));
  double e_neg = std::exp(0.75), e_pos = std::exp(1.0);
  EXPECT_NEAR(d[0], e_neg / (e_neg + e_pos), 1e-12);
  EXPECT_NEAR(d[1], e_pos / (e_neg + e_pos), 1e-12);
  ProbDist empty = clf.ClassifyOne(Text("nothing"));
  EXPECT_NEAR(empty[0], std::exp(0.25) / (std::exp(0.25) + 1.0), 1e-12);
}

TEST(KeywordClassifierTest, CountsEverySegment) {
  KeywordSoftmaxClassifier clf(LabelSet({"a", "b"}), {{{"x", 1.0}}, {}}, 1.0);
  ProbDist one = clf.ClassifyOne(TextSequence({{"x"}, {"y"}}, 1));
  ProbDist two = clf.ClassifyOne(TextSequence({{"x"}, {"x"}}, 1));
  EXPECT_GT(two[0], one[0]);
}

TEST(KeywordClassifierTest, Validates) {
  EXPECT_THROW(KeywordSoftmaxClassifier(LabelSet({"a", "b"}), {{}}, 1.0),
               std::invalid_argument);
  EXPECT_THROW(KeywordSoftmaxClassifier(LabelSet({"a", "b"}), {{}, {}}, 0.0),
               std::invalid_argument);
  EXPECT_THROW(ParseKeywordClassifier(R"({"labels": ["a", "b"],
                                         "weights": {}, "temperature": -1})"),
               DataError);
}

TEST(KeywordClassifierTest, OutputsSumToOne) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(-20.0, 20.0);
  std::vector<KeywordSoftmaxClassifier::WeightTable> tables(4);
  Tokens vocab;
  for (int i = 0; i < 30; ++i) {
    vocab.push_back("w" + std::to_string(i));
    for (auto& t : tables) t[vocab.back()] = w(rng);
  }
  KeywordSoftmaxClassifier clf(LabelSet({"a", "b", "c", "d"}), tables, 0.5,
                               {w(rng), w(rng), w(rng), w(rng)});
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  for (int trial = 0; trial < 1000; ++trial) {
    Tokens tokens(1 + trial % 12);
    for (auto& t : tokens) t = vocab[pick(rng)];
    ProbDist d = clf.ClassifyOne(TextSequence({tokens}));
    double sum = 0.0;
    for (double p : d.values()) {
      EXPECT_GE(p, 0.0);
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(TableInfillerTest, ExactBeatsContextAndFiltersByProbability) {
  TableInfiller infiller;
  infiller.SetContext("the", {{"a", 0.5}, {"b", 0.001}});
  infiller.SetExact("the <mask> is great", {{"film", 0.4}});
  auto x = Text("the movie is great");
  EXPECT_EQ(infiller.Propose(MaskReplace(x, 2), 5e-3),
            (std::vector<InfillProposal>{{"film", 0.4}}));
  EXPECT_EQ(infiller.Propose(MaskInsert(x, 1), 5e-3),
            (std::vector<InfillProposal>{{"a", 0.5}}));
  EXPECT_EQ(infiller.Propose(MaskInsert(x, 1), 1e-4).size(), 2u);
  EXPECT_TRUE(infiller.Propose(MaskReplace(x, 1), 5e-3).empty());
  infiller.SetContext(TableInfiller::kStartKey, {{"q", 0.2}});
  EXPECT_EQ(infiller.Propose(MaskReplace(x, 1), 5e-3).size(), 1u);
}

TEST(TableInfillerTest, ParseValidatesPairs) {
  EXPECT_THROW(ParseTableInfiller(R"({"context": {"a": [["x"]]}})"),
               DataError);
  EXPECT_THROW(ParseTableInfiller(R"({"context": {"a": [["x", 1.5]]}})"),
               DataError);
  TableInfiller t = ParseTableInfiller(R"({"context": {"a": [["x", 0.5]]}})");
  EXPECT_EQ(t.Propose(MaskInsert(Text("a"), 1), 0.0).size(), 1u);
}

TEST(JaccardTest, Examples) {
  JaccardSimilarity sim;
  EXPECT_DOUBLE_EQ(sim.Score(Text("a b c"), Text("a b c")), 1.0);
  EXPECT_DOUBLE_EQ(sim.Score(Text("a b c"), Text("a b d")), 0.5);
  // Multiset: {a, a} vs {a} is 1/2.
  EXPECT_DOUBLE_EQ(sim.Score(Text("a a"), Text("a")), 0.5);
  EXPECT_DOUBLE_EQ(sim.Score(Text("x"), Text("y")), 0.0);
  // Only the perturbable segment counts.
  EXPECT_DOUBLE_EQ(sim.Score(TextSequence({{"p"}, {"a"}}, 1),
                             TextSequence({{"q"}, {"a"}}, 1)),
                   1.0);
}

TEST(JaccardTest, SymmetricAndMatchesIndependentVersion) {
  testing::ToyWorld world(3, {});
  JaccardSimilarity sim;
  for (const auto& a : world.instances) {
    EXPECT_DOUBLE_EQ(sim.Score(a.text, a.text), 1.0);
    for (const auto& b : world.instances) {
      double s = sim.Score(a.text, b.text);
      EXPECT_DOUBLE_EQ(s, sim.Score(b.text, a.text));
      EXPECT_NEAR(s, testing::MultisetJaccard(a.text.tokens(), b.text.tokens()),
                  1e-15);
    }
  }
}

EmbeddingTable SmallTable() {
  return {{"a", {1.0, 0.0}}, {"b", {0.0, 1.0}}, {"c", {0.0, -1.0}}};
}

TEST(EmbeddingTest, Examples) {
  EmbeddingSimilarity sim(SmallTable());
  EXPECT_DOUBLE_EQ(sim.Score(Text("a"), Text("b")), 0.0);
  // Mean vectors (.5, .5) and (.5, -.5) are orthogonal.
  EXPECT_NEAR(sim.Score(Text("a b"), Text("a c")), 0.0, 1e-12);
  // Opposite vectors clamp to zero.
  EXPECT_DOUBLE_EQ(sim.Score(Text("b"), Text("c")), 0.0);
  EXPECT_NEAR(sim.Score(Text("a"), Text("a zz")), 1.0, 1e-12);
  EXPECT_NEAR(sim.Score(Text("a b"), Text("a")), std::sqrt(0.5), 1e-12);
}

TEST(EmbeddingTest, AllOutOfVocabulary) {
  EmbeddingSimilarity sim(SmallTable());
  EXPECT_DOUBLE_EQ(sim.Score(Text("xx"), Text("yy")), 0.0);
  EXPECT_EQ(sim.oov_warnings(), 1u);
  EXPECT_DOUBLE_EQ(sim.Score(Text("xx"), Text("xx")), 1.0);
  EXPECT_TRUE(EmbeddingCosineSimilarity({"xx"}, {"yy"}, SmallTable()).all_oov);
}

TEST(EmbeddingTest, SymmetricAndBounded) {
  EmbeddingSimilarity sim(SmallTable());
  std::vector<std::string> texts = {"a", "b", "c", "a b", "b c", "a a c", "zz a"};
  for (const auto& s : texts) {
    for (const auto& t : texts) {
      double v = sim.Score(Text(s), Text(t));
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      EXPECT_DOUBLE_EQ(v, sim.Score(Text(t), Text(s)));
    }
  }
}

TEST(EmbeddingTest, ParseTable) {
  EmbeddingTable t = ParseEmbeddingTable("a 1 0\n\nb 0 1\n");
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.at("b"), (std::vector<double>{0.0, 1.0}));
  EXPECT_THROW(ParseEmbeddingTable("a 1 0\nb 1\n"), DataError);
  EXPECT_THROW(ParseEmbeddingTable("a 1 x\n"), DataError);
  EXPECT_THROW(EmbeddingSimilarity({{"a", {1.0}}, {"b", {1.0, 2.0}}}),
               std::invalid_argument);
}

TEST(CachingTargetTest, CountsUniqueAndRaw) {
  ScriptedOracle oracle(LabelSet({"a", "b"}), ProbDist({0.5, 0.5}));
  CachingTarget cache(oracle);
  cache.Classify(std::vector{Text("x"), Text("y"), Text("x")});
  cache.Classify(std::vector{Text("y"), Text("z")});
  EXPECT_EQ(cache.unique_queries(), 3u);
  EXPECT_EQ(cache.raw_queries(), 5u);
}

TEST(CachingTargetTest, ForwardsOnlyMisses) {
  class Counting : public TargetModel {
   public:
    std::vector<ProbDist> Classify(
        std::span<const TextSequence> texts) const override {
      forwarded += texts.size();
      return std::vector<ProbDist>(texts.size(), ProbDist({1.0, 0.0}));
    }
    LabelSet label_set() const override { return LabelSet({"a", "b"}); }
    mutable std::size_t forwarded = 0;
  } inner;
  CachingTarget cache(inner);
  cache.Classify(std::vector{Text("x"), Text("x")});
  cache.Classify(std::vector{Text("x")});
  EXPECT_EQ(inner.forwarded, 1u);
}

TEST(CachingTargetTest, WrongCountIsProtocolError) {
  class Short : public TargetModel {
   public:
    std::vector<ProbDist> Classify(std::span<const TextSequence>) const override {
      return {};
    }
    LabelSet label_set() const override { return LabelSet({"a", "b"}); }
  } inner;
  CachingTarget cache(inner);
  EXPECT_THROW(cache.Classify(std::vector{Text("x")}), ProtocolError);
}

}  // namespace
}  // namespace beamattack
