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

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "beamattack/errors.h"
#include "beamattack/http_models.h"
#include "beamattack/io.h"
#include "beamattack/metrics.h"
#include "cli/backends.h"
#include "cli/runner.h"

namespace beamattack::cli {
namespace {

// Flags shared by every subcommand that runs or evaluates attacks. Values
// are kept as strings and funnelled through SetRunConfigValue so the file
// and the command line share one parser.
struct ConfigFlags {
  struct Override {
    CLI::Option* option = nullptr;
    std::string key;
    std::string value;
  };

  std::string config_path;
  std::string scoring;
  CLI::Option* scoring_option = nullptr;
  std::vector<std::unique_ptr<Override>> overrides;
  std::size_t workers = DefaultWorkers();

  void Register(CLI::App* app, bool allow_both_scoring) {
    app->add_option("--config", config_path, "key = value config file");
    Add(app, "--target", "target", "Target classifier backend");
    Add(app, "--infiller", "infiller", "Masked-LM infiller backend");
    Add(app, "--sim", "similarity", "Similarity backend");
    Add(app, "--beam-size", "beam_size", "Beam size K");
    Add(app, "--max-iters", "max_iters", "Maximum iterations T");
    Add(app, "--alpha", "alpha", "Minimum infiller probability");
    Add(app, "--beta", "beta", "Minimum similarity of a substitute");
    Add(app, "--epsilon", "epsilon", "Success similarity bar");
    Add(app, "--search", "search", "beam | greedy");
    Add(app, "--segment-policy", "segment_policy", "first | second | longest");
    Add(app, "--seed", "seed", "Seed");
    Add(app, "--batch-size", "batch_size", "Candidates per classify call");
    Add(app, "--connection-limit", "connection_limit",
        "Concurrent requests per backend");
    scoring_option = app->add_option(
        "--scoring", scoring,
        allow_both_scoring ? "prob-diff | gold-prob | both"
                           : "prob-diff | gold-prob");
    app->add_option("--workers", workers, "Attack worker threads");
  }

  void Add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    auto o = std::make_unique<Override>();
    o->key = key;
    o->option = app->add_option(flag, o->value, help);
    overrides.push_back(std::move(o));
  }

  bool ScoringBoth() const { return scoring == "both"; }

  RunConfig Resolve() const {
    RunConfig config;
    if (!config_path.empty()) config = LoadRunConfig(config_path);
    for (const auto& o : overrides) {
      if (o->option->count() > 0) SetRunConfigValue(config, o->key, o->value);
    }
    if (scoring_option->count() > 0 && !ScoringBoth()) {
      SetRunConfigValue(config, "scoring", scoring);
    }
    config.attack.Validate();
    if (workers == 0) throw ConfigError("--workers must be at least 1");
    return config;
  }
};

// Optional delegated-quality scorers.
struct QualityFlags {
  std::string perplexity;
  std::string grammar;

  void Register(CLI::App* app) {
    app->add_option("--perplexity", perplexity,
                    "Perplexity scorer endpoint (http://...)");
    app->add_option("--grammar", grammar,
                    "Grammar checker endpoint (http://...)");
  }

  std::unique_ptr<TextScorer> Make(const std::string& spec,
                                   HttpTextScorer::Kind kind,
                                   std::size_t connection_limit) const {
    if (spec.empty()) return nullptr;
    if (!IsHttpSpec(spec)) throw ConfigError("scorer must be http: " + spec);
    HttpOptions options;
    options.endpoint = spec;
    options.connection_limit = connection_limit;
    return std::make_unique<HttpTextScorer>(options, kind);
  }

  MetricsReport Report(std::span<const AttackRecord> records,
                       std::size_t connection_limit) const {
    auto ppl = Make(perplexity, HttpTextScorer::Kind::kPerplexity,
                    connection_limit);
    auto gerr =
        Make(grammar, HttpTextScorer::Kind::kGrammar, connection_limit);
    return ComputeReport(records, ppl.get(), gerr.get());
  }
};

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << contents;
  if (!out) throw ConfigError("failed writing " + path);
}

std::string DefaultReportPath(const std::string& corpus_path) {
  constexpr std::string_view kExt = ".jsonl";
  if (corpus_path.size() > kExt.size() && corpus_path.ends_with(kExt)) {
    return corpus_path.substr(0, corpus_path.size() - kExt.size()) +
           ".report.json";
  }
  return corpus_path + ".report.json";
}

std::vector<Instance> LoadInstances(const std::string& path,
                                    const RunConfig& config,
                                    const TargetModel& target) {
  return LoadDataset(path, target.label_set(), config.segment_policy);
}

void Progress(std::ostream& err, std::size_t done, std::size_t total,
              const AttackRecord& record) {
  err << "[" << done << "/" << total << "] " << record.id << " "
      << ToString(record.status) << "\n";
}

bool AnyBackendError(std::span<const AttackRecord> records) {
  return std::any_of(records.begin(), records.end(), [](const auto& r) {
    return r.status == AttackStatus::kBackendError;
  });
}

// ---------------------------------------------------------------- attack

struct AttackCommand {
  ConfigFlags flags;
  QualityFlags quality;
  std::string dataset;
  std::string out_path;
  std::string report_path;

  void Register(CLI::App* app) {
    app->add_option("--dataset", dataset, "JSONL dataset")->required();
    app->add_option("--out", out_path, "Corpus JSONL to write")->required();
    app->add_option("--report", report_path,
                    "Report JSON (default: <out>.report.json)");
    flags.Register(app, /*allow_both_scoring=*/false);
    quality.Register(app);
  }

  int Run(std::ostream& out, std::ostream& err) const {
    if (flags.ScoringBoth()) {
      throw ConfigError("--scoring both is only valid for ablate");
    }
    RunConfig config = flags.Resolve();
    Backends backends = MakeBackends(config);
    std::vector<Instance> instances =
        LoadInstances(dataset, config, *backends.target);
    const LabelSet& labels = backends.target->label_set();

    std::ofstream corpus(out_path, std::ios::binary | std::ios::trunc);
    if (!corpus) throw ConfigError("cannot write " + out_path);
    std::vector<AttackRecord> records = AttackAll(
        instances, config.attack, backends.models(), flags.workers,
        [&](std::size_t i, const AttackRecord& record) {
          corpus << CorpusRecordToJson(record, labels) << "\n";
          corpus.flush();
          Progress(err, i + 1, instances.size(), record);
        });
    corpus.close();

    MetricsReport report = quality.Report(records, config.connection_limit);
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";
    WriteFile(report_path.empty() ? DefaultReportPath(out_path) : report_path,
              ReportToJson(report));
    out << FormatReportTable(report);
    return AnyBackendError(records) ? kExitBackend : kExitOk;
  }
};

// ------------------------------------------------------------------ eval

struct EvalCommand {
  QualityFlags quality;
  std::string corpus_path;
  std::string target;
  std::string report_path;
  std::size_t connection_limit = 8;
  std::size_t batch_size = 64;

  void Register(CLI::App* app) {
    app->add_option("--corpus", corpus_path, "Corpus JSONL")->required();
    app->add_option("--target", target,
                    "Second target; adds transfer accuracy");
    app->add_option("--report", report_path,
                    "Report JSON (default: standard output)");
    app->add_option("--connection-limit", connection_limit,
                    "Concurrent requests per backend");
    app->add_option("--batch-size", batch_size, "Texts per classify call");
    quality.Register(app);
  }

  int Run(std::ostream& out, std::ostream& err) const {
    std::vector<AttackRecord> records = LoadCorpus(corpus_path);
    MetricsReport report = quality.Report(records, connection_limit);
    if (!target.empty()) {
      auto other = MakeTarget(target, connection_limit, batch_size);
      CheckLabels(*other);
      if (report.success_count > 0) {
        report.transfer_accuracy = TransferAccuracy(records, *other);
      } else {
        report.warnings.push_back("no successes; transfer accuracy undefined");
      }
    }
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";
    std::string json = ReportToJson(report);
    if (report_path.empty()) {
      out << json;
    } else {
      WriteFile(report_path, json);
      out << FormatReportTable(report);
    }
    return kExitOk;
  }

  // Each record's gold index must name the same label under `other`.
  void CheckLabels(const TargetModel& other) const {
    std::vector<std::string> names = ReadCorpusLabels(corpus_path);
    std::vector<AttackRecord> records = LoadCorpus(corpus_path);
    const LabelSet& labels = other.label_set();
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].gold >= labels.size() ||
          labels.name(records[i].gold) != names[i]) {
        throw DataError("label set mismatch between corpus and target at " +
                        records[i].id);
      }
    }
  }
};

// ---------------------------------------------------------------- ablate

struct AblationCell {
  std::size_t beam_size = 0;
  ScoringMode scoring = ScoringMode::kProbDiff;
  MetricsReport report;
};

std::string Cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

struct Spread {
  std::optional<double> mean;
  std::optional<double> half_range;
};

// Mean and half of (max - min) over the cells where the metric is defined.
Spread SpreadOf(const std::vector<std::optional<double>>& values) {
  std::vector<double> present;
  for (const auto& v : values) {
    if (v) present.push_back(*v);
  }
  if (present.empty()) return {};
  double sum = 0.0;
  for (double v : present) sum += v;
  auto [lo, hi] = std::minmax_element(present.begin(), present.end());
  return {sum / present.size(), (*hi - *lo) / 2.0};
}

nlohmann::ordered_json Optional(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

struct AblateCommand {
  ConfigFlags flags;
  std::string dataset;
  std::string out_path;
  std::vector<std::size_t> sizes;

  void Register(CLI::App* app) {
    app->add_option("--dataset", dataset, "JSONL dataset")->required();
    app->add_option("--sizes", sizes, "Beam sizes, e.g. 1,2,3,4")
        ->required()
        ->delimiter(',');
    app->add_option("--out", out_path, "Ablation JSON to write");
    flags.Register(app, /*allow_both_scoring=*/true);
  }

  int Run(std::ostream& out, std::ostream& err) const {
    RunConfig config = flags.Resolve();
    if (config.attack.search == SearchMode::kGreedy) {
      throw ConfigError("ablate sweeps beam sizes; --search greedy conflicts");
    }
    if (sizes.empty()) throw ConfigError("--sizes is empty");
    for (std::size_t k : sizes) {
      if (k == 0) throw ConfigError("beam sizes must be at least 1");
    }
    std::vector<ScoringMode> modes;
    if (flags.ScoringBoth()) {
      modes = {ScoringMode::kProbDiff, ScoringMode::kGoldProb};
    } else {
      modes = {config.attack.scoring};
    }

    Backends backends = MakeBackends(config);
    std::vector<Instance> instances =
        LoadInstances(dataset, config, *backends.target);

    bool backend_failure = false;
    std::vector<AblationCell> cells;
    for (ScoringMode mode : modes) {
      for (std::size_t k : sizes) {
        AttackConfig attack = config.attack;
        attack.scoring = mode;
        attack.beam_size = k;
        std::vector<AttackRecord> records =
            AttackAll(instances, attack, backends.models(), flags.workers);
        backend_failure = backend_failure || AnyBackendError(records);
        err << "ablate " << ToString(mode) << " K=" << k << " done\n";
        cells.push_back({k, mode, ComputeReport(records)});
      }
    }

    out << FormatTable(modes, cells);
    if (!out_path.empty()) WriteFile(out_path, ToJson(modes, cells));
    return backend_failure ? kExitBackend : kExitOk;
  }

  using Getter = std::optional<double> MetricsReport::*;
  static constexpr std::pair<const char*, Getter> kMetrics[] = {
      {"a_rate", &MetricsReport::a_rate},
      {"mod_rate", &MetricsReport::mod_rate},
      {"sim_mean", &MetricsReport::sim_mean},
  };

  std::vector<std::optional<double>> Column(
      const std::vector<AblationCell>& cells, ScoringMode mode,
      Getter metric) const {
    std::vector<std::optional<double>> values;
    for (const auto& c : cells) {
      if (c.scoring == mode) values.push_back(c.report.*metric);
    }
    return values;
  }

  std::string FormatTable(const std::vector<ScoringMode>& modes,
                          const std::vector<AblationCell>& cells) const {
    std::ostringstream os;
    os << std::left << std::setw(8) << "K";
    for (ScoringMode mode : modes) {
      std::string name(ToString(mode));
      for (const char* col : {" A-rate", " Mod", " Sim"}) {
        os << std::setw(20) << (name + col);
      }
    }
    os << "\n";
    for (std::size_t row = 0; row < sizes.size(); ++row) {
      os << std::setw(8) << sizes[row];
      for (std::size_t m = 0; m < modes.size(); ++m) {
        const MetricsReport& r = cells[m * sizes.size() + row].report;
        os << std::setw(20) << Cell(r.a_rate) << std::setw(20)
           << Cell(r.mod_rate) << std::setw(20) << Cell(r.sim_mean);
      }
      os << "\n";
    }
    os << std::setw(8) << "mean";
    for (ScoringMode mode : modes) {
      for (const auto& [name, metric] : kMetrics) {
        Spread s = SpreadOf(Column(cells, mode, metric));
        os << std::setw(20)
           << (s.mean ? Cell(s.mean) + " +/- " + Cell(s.half_range) : "-");
      }
    }
    os << "\n";
    return os.str();
  }

  std::string ToJson(const std::vector<ScoringMode>& modes,
                     const std::vector<AblationCell>& cells) const {
    nlohmann::ordered_json doc;
    doc["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : cells) {
      nlohmann::ordered_json j;
      j["beam_size"] = c.beam_size;
      j["scoring"] = std::string(ToString(c.scoring));
      j["attacked"] = c.report.attacked_count;
      j["success"] = c.report.success_count;
      for (const auto& [name, metric] : kMetrics) {
        j[name] = Optional(c.report.*metric);
      }
      j["query_mean"] = Optional(c.report.query_mean);
      doc["cells"].push_back(std::move(j));
    }
    doc["summary"] = nlohmann::ordered_json::array();
    for (ScoringMode mode : modes) {
      for (const auto& [name, metric] : kMetrics) {
        Spread s = SpreadOf(Column(cells, mode, metric));
        nlohmann::ordered_json j;
        j["scoring"] = std::string(ToString(mode));
        j["metric"] = name;
        j["mean"] = Optional(s.mean);
        j["half_range"] = Optional(s.half_range);
        doc["summary"].push_back(std::move(j));
      }
    }
    return doc.dump(2) + "\n";
  }
};

// --------------------------------------------------------------- augment

struct AugmentCommand {
  std::string train;
  std::string corpus;
  std::string out_path;

  void Register(CLI::App* app) {
    app->add_option("--train", train, "Training dataset JSONL")->required();
    app->add_option("--corpus", corpus, "Corpus JSONL")->required();
    app->add_option("--out", out_path, "Augmented dataset JSONL")->required();
  }

  int Run(std::ostream& out, std::ostream&) const {
    std::vector<DatasetRecord> records = LoadDatasetRecords(train);
    std::vector<AttackRecord> attacks = LoadCorpus(corpus);
    std::vector<DatasetRecord> augmented =
        ExportAdversarialTrainingSet(records, attacks);
    std::ostringstream os;
    WriteDatasetRecords(os, augmented);
    WriteFile(out_path, os.str());
    out << "wrote " << augmented.size() << " records ("
        << augmented.size() - records.size() << " adversarial)\n";
    return kExitOk;
  }
};

// ----------------------------------------------------------- serve-check

struct ServeCheckCommand {
  ConfigFlags flags;
  std::vector<std::string> endpoints;

  void Register(CLI::App* app) {
    app->add_option("--endpoint", endpoints, "Endpoint to probe (repeatable)");
    flags.Register(app, /*allow_both_scoring=*/false);
  }

  int Run(std::ostream& out, std::ostream&) const {
    std::vector<std::string> targets = endpoints;
    if (targets.empty()) {
      RunConfig config = flags.Resolve();
      for (const std::string* spec :
           {&config.target, &config.infiller, &config.similarity}) {
        if (IsHttpSpec(*spec)) targets.push_back(*spec);
      }
    }
    if (targets.empty()) throw ConfigError("no http endpoints to check");
    bool all_ok = true;
    for (const auto& endpoint : targets) {
      HttpOptions options;
      options.endpoint = endpoint;
      bool ok = CheckHealth(options);
      all_ok = all_ok && ok;
      out << (ok ? "ok " : "unreachable ") << endpoint << "\n";
    }
    return all_ok ? kExitOk : kExitBackend;
  }
};

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app("Word-level adversarial attacks on text classifiers",
               "beamattack");
  app.require_subcommand(1);

  AttackCommand attack;
  EvalCommand eval;
  AblateCommand ablate;
  AugmentCommand augment;
  ServeCheckCommand serve_check;
  CLI::App* attack_app =
      app.add_subcommand("attack", "Attack every instance of a dataset");
  CLI::App* eval_app =
      app.add_subcommand("eval", "Recompute metrics for a corpus");
  CLI::App* ablate_app =
      app.add_subcommand("ablate", "Sweep beam sizes and scoring modes");
  CLI::App* augment_app = app.add_subcommand(
      "augment", "Append successful adversarial examples to a dataset");
  CLI::App* serve_app =
      app.add_subcommand("serve-check", "Probe model server health");
  attack.Register(attack_app);
  eval.Register(eval_app);
  ablate.Register(ablate_app);
  augment.Register(augment_app);
  serve_check.Register(serve_app);

  // CLI11 consumes the vector from the back.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*attack_app) return attack.Run(out, err);
    if (*eval_app) return eval.Run(out, err);
    if (*ablate_app) return ablate.Run(out, err);
    if (*augment_app) return augment.Run(out, err);
    if (*serve_app) return serve_check.Run(out, err);
  } catch (const BackendError& e) {
    err << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UndefinedMetricError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace beamattack::cli
