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

#include "cli/commands.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "beamattack/errors.h"
#include "beamattack/io.h"
#include "beamattack/search.h"
#include "cli/runner.h"
#include "json.hpp"
#include "testing/loopback_server.h"
#include "testing/toy_world.h"

namespace beamattack {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string Slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t CountLines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() /
           ("beamattack_cli_test_" + std::to_string(rd()));
    fs::create_directories(dir_);
    bench_ = testing::MakeKeywordBenchmark(3, 10);
    Write("clf.json", bench_.classifier_json);
    Write("infill.json", bench_.infiller_json);
    std::ofstream data(Path("data.jsonl"));
    WriteDatasetRecords(data, bench_.dataset);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }
  void Write(const std::string& name, const std::string& text) {
    std::ofstream(Path(name)) << text;
  }

  int Run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::RunCli(args, out_, err_);
  }

  std::vector<std::string> AttackArgs() const {
    return {"attack",
            "--dataset", Path("data.jsonl"),
            "--out", Path("corpus.jsonl"),
            "--target", "builtin:keyword:" + Path("clf.json"),
            "--infiller", "builtin:table:" + Path("infill.json"),
            "--beam-size", "3",
            "--max-iters", "4",
            "--workers", "2"};
  }

  fs::path dir_;
  testing::KeywordBenchmark bench_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, AttackWritesCorpusAndReport) {
  ASSERT_EQ(Run(AttackArgs()), cli::kExitOk) << err_.str();
  std::string corpus = Slurp(Path("corpus.jsonl"));
  EXPECT_EQ(CountLines(corpus), 10u);
  auto records = LoadCorpus(Path("corpus.jsonl"));
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].id, bench_.dataset[i].id);
  }
  json report = json::parse(Slurp(Path("corpus.report.json")));
  EXPECT_EQ(report["attacked_count"].get<std::size_t>() +
                report["skipped_count"].get<std::size_t>(),
            10u);
  EXPECT_NE(out_.str().find("A-rate"), std::string::npos);
  EXPECT_NE(err_.str().find("[10/10]"), std::string::npos);

  // The same records come out of the library directly.
  auto clf = ParseKeywordClassifier(bench_.classifier_json);
  auto infiller = ParseTableInfiller(bench_.infiller_json);
  JaccardSimilarity jaccard;
  auto instances =
      ToInstances(bench_.dataset, clf.label_set(), SegmentPolicy::kFirst);
  AttackConfig config;
  config.beam_size = 3;
  config.max_iters = 4;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    EXPECT_EQ(Attack(instances[i], config, {clf, infiller, jaccard}),
              records[i]);
  }
}

TEST_F(CliTest, ConfigFileAndOverrides) {
  Write("run.conf", "target = builtin:keyword:" + Path("clf.json") +
                        "\ninfiller = builtin:table:" + Path("infill.json") +
                        "\nbeam_size = 2\nmax_iters = 2\n");
  ASSERT_EQ(Run({"attack", "--config", Path("run.conf"), "--dataset",
                 Path("data.jsonl"), "--out", Path("a.jsonl"), "--report",
                 Path("a.json"), "--scoring", "gold-prob", "--search",
                 "greedy"}),
            cli::kExitOk)
      << err_.str();
  for (const auto& r : LoadCorpus(Path("a.jsonl"))) {
    EXPECT_LE(r.path.size(), 2u);
  }
  EXPECT_TRUE(fs::exists(Path("a.json")));
}

TEST_F(CliTest, InvalidSettingsExitOne) {
  auto args = AttackArgs();
  args.insert(args.end(), {"--beam-size", "0"});
  EXPECT_EQ(Run(args), cli::kExitConfig);
  EXPECT_EQ(Run({"attack", "--dataset", Path("data.jsonl")}), cli::kExitConfig);
  EXPECT_EQ(Run({"frobnicate"}), cli::kExitConfig);
  EXPECT_EQ(Run({"attack", "--dataset", Path("data.jsonl"), "--out",
                 Path("x.jsonl"), "--target", "builtin:nope:x", "--infiller",
                 "builtin:table:" + Path("infill.json")}),
            cli::kExitConfig);
  EXPECT_EQ(Run({"attack", "--dataset", Path("missing.jsonl"), "--out",
                 Path("x.jsonl"), "--target",
                 "builtin:keyword:" + Path("clf.json"), "--infiller",
                 "builtin:table:" + Path("infill.json")}),
            cli::kExitConfig);
  // Scoring "both" is only meaningful for ablate.
  args = AttackArgs();
  args.insert(args.end(), {"--scoring", "both"});
  EXPECT_EQ(Run(args), cli::kExitConfig);
}

TEST_F(CliTest, UnreachableTargetExitsTwo) {
  EXPECT_EQ(Run({"attack", "--dataset", Path("data.jsonl"), "--out",
                 Path("x.jsonl"), "--target", "http://127.0.0.1:9",
                 "--infiller", "builtin:table:" + Path("infill.json")}),
            cli::kExitBackend);
  EXPECT_EQ(Run({"serve-check", "--endpoint", "http://127.0.0.1:9"}),
            cli::kExitBackend);
  EXPECT_NE(out_.str().find("unreachable http://127.0.0.1:9"),
            std::string::npos);
}

TEST_F(CliTest, AttackOverLoopbackServer) {
  auto clf = ParseKeywordClassifier(bench_.classifier_json);
  auto infiller = ParseTableInfiller(bench_.infiller_json);
  testing::LoopbackServer server({.target = &clf, .infiller = &infiller});
  ASSERT_EQ(Run(AttackArgs()), cli::kExitOk);
  ASSERT_EQ(Run({"attack", "--dataset", Path("data.jsonl"), "--out",
                 Path("remote.jsonl"), "--target", server.url(), "--infiller",
                 server.url(), "--beam-size", "3", "--max-iters", "4"}),
            cli::kExitOk)
      << err_.str();
  auto a = LoadCorpus(Path("corpus.jsonl"));
  auto b = LoadCorpus(Path("remote.jsonl"));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].status, b[i].status);
    EXPECT_EQ(a[i].path, b[i].path);
  }
  EXPECT_EQ(Run({"serve-check", "--endpoint", server.url()}), cli::kExitOk);
  EXPECT_EQ(out_.str(), "ok " + server.url() + "\n");
}

TEST_F(CliTest, EvalAloneAndWithTarget) {
  ASSERT_EQ(Run(AttackArgs()), cli::kExitOk);
  std::string attack_report = Slurp(Path("corpus.report.json"));
  ASSERT_EQ(Run({"eval", "--corpus", Path("corpus.jsonl")}), cli::kExitOk);
  EXPECT_EQ(out_.str(), attack_report);
  EXPECT_FALSE(json::parse(out_.str()).contains("transfer_accuracy"));

  ASSERT_EQ(Run({"eval", "--corpus", Path("corpus.jsonl"), "--target",
                 "builtin:keyword:" + Path("clf.json"), "--report",
                 Path("eval.json")}),
            cli::kExitOk);
  json with_target = json::parse(Slurp(Path("eval.json")));
  // The attacked model itself is fooled by every success.
  EXPECT_DOUBLE_EQ(with_target["transfer_accuracy"].get<double>(), 0.0);
  EXPECT_NE(out_.str().find("Transfer"), std::string::npos);
}

TEST_F(CliTest, EvalRejectsLabelMismatch) {
  ASSERT_EQ(Run(AttackArgs()), cli::kExitOk);
  Write("other.json", R"({"labels": ["sports", "news"], "weights": {}})");
  EXPECT_EQ(Run({"eval", "--corpus", Path("corpus.jsonl"), "--target",
                 "builtin:keyword:" + Path("other.json")}),
            cli::kExitConfig);
}

TEST_F(CliTest, AblateTableAndJson) {
  auto args = AttackArgs();
  args[0] = "ablate";
  args[3] = "--sizes";
  args[4] = "1,2,3,4";
  args.insert(args.end(), {"--out", Path("ablate.json"), "--scoring", "both"});
  ASSERT_EQ(Run(args), cli::kExitOk) << err_.str();
  std::istringstream table(out_.str());
  std::vector<std::string> lines;
  for (std::string line; std::getline(table, line);) lines.push_back(line);
  // Header, four rows, mean row.
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_NE(lines[0].find("prob_diff A-rate"), std::string::npos);
  EXPECT_NE(lines[0].find("gold_prob A-rate"), std::string::npos);
  EXPECT_EQ(lines[5].rfind("mean", 0), 0u);

  json doc = json::parse(Slurp(Path("ablate.json")));
  ASSERT_EQ(doc["cells"].size(), 8u);
  for (const auto& summary : doc["summary"]) {
    std::vector<double> values;
    for (const auto& cell : doc["cells"]) {
      const json& v = cell[summary["metric"].get<std::string>()];
      if (cell["scoring"] == summary["scoring"] && !v.is_null()) {
        values.push_back(v.get<double>());
      }
    }
    ASSERT_FALSE(values.empty());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    EXPECT_NEAR(summary["mean"].get<double>(), mean, 1e-12);
    EXPECT_NEAR(summary["half_range"].get<double>(), (*hi - *lo) / 2, 1e-12);
  }
  // The K = 1 cell matches a plain attack run.
  auto single = AttackArgs();
  single[10] = "1";
  ASSERT_EQ(Run(single), cli::kExitOk);
  json report = json::parse(Slurp(Path("corpus.report.json")));
  EXPECT_EQ(doc["cells"][0]["success"], report["success_count"]);
}

TEST_F(CliTest, AblateRejectsGreedyAndZero) {
  auto args = AttackArgs();
  args[0] = "ablate";
  args[3] = "--sizes";
  args[4] = "1,2";
  auto greedy = args;
  greedy.insert(greedy.end(), {"--search", "greedy"});
  EXPECT_EQ(Run(greedy), cli::kExitConfig);
  args[4] = "0,2";
  EXPECT_EQ(Run(args), cli::kExitConfig);
}

TEST_F(CliTest, Augment) {
  ASSERT_EQ(Run(AttackArgs()), cli::kExitOk);
  ASSERT_EQ(Run({"augment", "--train", Path("data.jsonl"), "--corpus",
                 Path("corpus.jsonl"), "--out", Path("aug.jsonl")}),
            cli::kExitOk)
      << err_.str();
  auto successes = 0u;
  for (const auto& r : LoadCorpus(Path("corpus.jsonl"))) successes += r.success();
  auto augmented = LoadDatasetRecords(Path("aug.jsonl"));
  EXPECT_EQ(augmented.size(), 10u + successes);
}

TEST(RunnerTest, OrderedSinkAndWorkerCounts) {
  testing::ToyWorldOptions options;
  options.num_instances = 12;
  testing::ToyWorld world(21, options);
  AttackConfig config;
  config.beta = 0.3;
  auto serial = cli::AttackAll(world.instances, config, world.models(), 1);
  std::vector<std::size_t> order;
  auto parallel = cli::AttackAll(
      world.instances, config, world.models(), 4,
      [&](std::size_t i, const AttackRecord& r) {
        order.push_back(i);
        EXPECT_EQ(r.id, world.instances[i].id);
      });
  EXPECT_EQ(serial, parallel);
  ASSERT_EQ(order.size(), 12u);
  for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(order[i], i);
  EXPECT_THROW(cli::AttackAll(world.instances, config, world.models(), 0),
               ConfigError);
}

TEST(RunnerTest, RethrowsWorkerExceptions) {
  class Broken : public TargetModel {
   public:
    std::vector<ProbDist> Classify(std::span<const TextSequence>) const override {
      throw std::logic_error("broken target");
    }
    LabelSet label_set() const override { return LabelSet({"a", "b"}); }
  } target;
  TableInfiller infiller;
  JaccardSimilarity sim;
  std::vector<Instance> instances(3, {"i", TextSequence::FromText("x"), 0});
  EXPECT_THROW(cli::AttackAll(instances, {}, {target, infiller, sim}, 2),
               std::logic_error);
}

}  // namespace
}  // namespace beamattack
