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

#include "beamattack/io.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "beamattack/actions.h"
#include "beamattack/errors.h"
#include "json.hpp"

namespace beamattack {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::string Trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

ordered_json TextToJson(const TextSequence& text) {
  ordered_json segments = ordered_json::array();
  for (std::size_t s = 0; s < text.segments().size(); ++s) {
    segments.push_back(text.SegmentText(s));
  }
  return ordered_json{{"segments", std::move(segments)},
                      {"perturbable", text.perturbable()}};
}

TextSequence TextFromJson(const json& doc) {
  std::vector<Tokens> segments;
  for (const auto& s : doc.at("segments")) {
    segments.push_back(Tokenize(s.get<std::string>()));
  }
  return TextSequence(std::move(segments),
                      doc.at("perturbable").get<std::size_t>());
}

std::size_t ParseSize(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  if (!value.empty() && value.front() == '-') {
    throw ConfigError(std::string(key) + " must be a non-negative integer");
  }
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                   out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(std::string(key) + ": not an integer: " +
                      std::string(value));
  }
  return out;
}

double ParseDouble(std::string_view key, std::string_view value) {
  std::string s(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ConfigError(std::string(key) + ": not a number: " + s);
  }
  return out;
}

}  // namespace

std::string_view ToString(SegmentPolicy policy) {
  switch (policy) {
    case SegmentPolicy::kFirst:
      return "first";
    case SegmentPolicy::kSecond:
      return "second";
    case SegmentPolicy::kLongest:
      return "longest";
  }
  return "unknown";
}

SegmentPolicy ParseSegmentPolicy(std::string_view name) {
  if (name == "first") return SegmentPolicy::kFirst;
  if (name == "second") return SegmentPolicy::kSecond;
  if (name == "longest") return SegmentPolicy::kLongest;
  throw ConfigError("unknown segment policy: " + std::string(name));
}

std::vector<DatasetRecord> ReadDatasetRecords(std::istream& in) {
  std::vector<DatasetRecord> records;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto where = [&] { return "dataset line " + std::to_string(line_no); };
    DatasetRecord record;
    try {
      json doc = json::parse(line);
      record.id = doc.at("id").get<std::string>();
      record.label = doc.at("label").get<std::string>();
      const json& text = doc.at("text");
      if (text.is_string()) {
        record.segments.push_back(text.get<std::string>());
      } else {
        record.segments.push_back(text.at("premise").get<std::string>());
        record.segments.push_back(text.at("hypothesis").get<std::string>());
      }
    } catch (const json::exception& e) {
      throw DataError(where() + ": " + e.what());
    }
    if (!ids.insert(record.id).second) {
      throw DataError(where() + ": duplicate id " + record.id);
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<DatasetRecord> LoadDatasetRecords(const std::string& path) {
  auto in = OpenInput(path);
  return ReadDatasetRecords(in);
}

std::string DatasetRecordToJson(const DatasetRecord& record) {
  ordered_json doc;
  doc["id"] = record.id;
  if (record.segments.size() == 1) {
    doc["text"] = record.segments[0];
  } else {
    doc["text"] = ordered_json{{"premise", record.segments.at(0)},
                               {"hypothesis", record.segments.at(1)}};
  }
  doc["label"] = record.label;
  return doc.dump();
}

void WriteDatasetRecords(std::ostream& out,
                         std::span<const DatasetRecord> records) {
  for (const auto& r : records) out << DatasetRecordToJson(r) << '\n';
}

std::vector<Instance> ToInstances(std::span<const DatasetRecord> records,
                                  const LabelSet& labels,
                                  SegmentPolicy policy) {
  std::vector<Instance> instances;
  instances.reserve(records.size());
  for (const auto& r : records) {
    auto gold = labels.IndexOf(r.label);
    if (!gold) {
      throw DataError("record " + r.id + ": unknown label \"" + r.label +
                      "\"");
    }
    std::vector<Tokens> segments;
    for (const auto& s : r.segments) segments.push_back(Tokenize(s));
    std::size_t perturbable = 0;
    if (segments.size() == 2) {
      switch (policy) {
        case SegmentPolicy::kFirst:
          perturbable = 0;
          break;
        case SegmentPolicy::kSecond:
          perturbable = 1;
          break;
        case SegmentPolicy::kLongest:
          perturbable = segments[1].size() > segments[0].size() ? 1 : 0;
          break;
      }
    }
    try {
      instances.push_back({r.id, TextSequence(std::move(segments), perturbable),
                           *gold});
    } catch (const std::invalid_argument& e) {
      throw DataError("record " + r.id + ": " + e.what());
    }
  }
  return instances;
}

std::vector<Instance> LoadDataset(const std::string& path,
                                  const LabelSet& labels,
                                  SegmentPolicy policy) {
  return ToInstances(LoadDatasetRecords(path), labels, policy);
}

std::string CorpusRecordToJson(const AttackRecord& record,
                               const LabelSet& labels) {
  ordered_json doc;
  doc["id"] = record.id;
  doc["status"] = std::string(ToString(record.status));
  doc["label"] = labels.name(record.gold);
  doc["gold"] = record.gold;
  doc["original"] = TextToJson(record.original);
  if (record.adversarial) doc["adversarial"] = TextToJson(*record.adversarial);
  ordered_json path = ordered_json::array();
  for (const auto& step : record.path) {
    path.push_back(ordered_json{{"kind", std::string(ToString(step.kind))},
                                {"pos", step.position},
                                {"token", step.token}});
  }
  doc["path"] = std::move(path);
  doc["iterations"] = record.iterations;
  doc["queries"] = record.query_count;
  doc["raw_queries"] = record.raw_query_count;
  if (record.similarity) doc["sim"] = *record.similarity;
  if (record.final_dist) doc["final_probs"] = record.final_dist->values();
  if (!record.error.empty()) doc["error"] = record.error;
  return doc.dump();
}

AttackRecord CorpusRecordFromJson(std::string_view line) {
  try {
    json doc = json::parse(line);
    AttackRecord record{.id = doc.at("id").get<std::string>(),
                        .gold = doc.at("gold").get<std::size_t>(),
                        .status = ParseAttackStatus(
                            doc.at("status").get<std::string>()),
                        .original = TextFromJson(doc.at("original"))};
    if (doc.contains("adversarial")) {
      record.adversarial = TextFromJson(doc["adversarial"]);
    }
    for (const auto& step : doc.at("path")) {
      record.path.push_back(
          {ParseActionKind(step.at("kind").get<std::string>()),
           step.at("pos").get<std::size_t>(),
           step.at("token").get<std::string>()});
    }
    record.iterations = doc.at("iterations").get<std::size_t>();
    record.query_count = doc.at("queries").get<std::size_t>();
    record.raw_query_count = doc.value("raw_queries", std::size_t{0});
    if (doc.contains("sim")) record.similarity = doc["sim"].get<double>();
    if (doc.contains("final_probs")) {
      record.final_dist = ProbDist(doc["final_probs"].get<std::vector<double>>());
    }
    record.error = doc.value("error", "");
    if (record.success() &&
        (!record.adversarial || !record.similarity || !record.final_dist)) {
      throw DataError("success record " + record.id +
                      " lacks adversarial, sim or final_probs");
    }
    return record;
  } catch (const json::exception& e) {
    throw DataError(std::string("corpus record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("corpus record: ") + e.what());
  }
}

void WriteCorpus(std::ostream& out, std::span<const AttackRecord> records,
                 const LabelSet& labels) {
  for (const auto& r : records) out << CorpusRecordToJson(r, labels) << '\n';
}

std::vector<AttackRecord> ReadCorpus(std::istream& in) {
  std::vector<AttackRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      records.push_back(CorpusRecordFromJson(line));
    } catch (const DataError& e) {
      throw DataError("corpus line " + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return records;
}

std::vector<AttackRecord> LoadCorpus(const std::string& path) {
  auto in = OpenInput(path);
  return ReadCorpus(in);
}

std::vector<std::string> ReadCorpusLabels(const std::string& path) {
  auto in = OpenInput(path);
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    try {
      labels.push_back(json::parse(line).at("label").get<std::string>());
    } catch (const json::exception& e) {
      throw DataError(std::string("corpus label: ") + e.what());
    }
  }
  return labels;
}

TextSequence ReplayPath(const TextSequence& original,
                        std::span<const ActionStep> path) {
  TextSequence current = original;
  for (const auto& step : path) current = ApplyAction(current, step);
  return current;
}

std::vector<DatasetRecord> ExportAdversarialTrainingSet(
    std::span<const DatasetRecord> train,
    std::span<const AttackRecord> corpus) {
  std::vector<DatasetRecord> out(train.begin(), train.end());
  std::unordered_set<std::string> ids;
  std::unordered_map<std::string, const DatasetRecord*> by_id;
  for (const auto& r : train) {
    ids.insert(r.id);
    by_id.emplace(r.id, &r);
  }
  for (const auto& record : corpus) {
    if (!record.success() || !record.adversarial) continue;
    DatasetRecord adv;
    adv.id = record.id + "-adv";
    if (!ids.insert(adv.id).second) {
      throw DataError("id collision while exporting: " + adv.id);
    }
    auto it = by_id.find(record.id);
    if (it == by_id.end()) {
      throw DataError("corpus record " + record.id +
                      " is not in the training set");
    }
    adv.label = it->second->label;
    for (std::size_t s = 0; s < record.adversarial->segments().size(); ++s) {
      adv.segments.push_back(record.adversarial->SegmentText(s));
    }
    out.push_back(std::move(adv));
  }
  return out;
}

void SetRunConfigValue(RunConfig& config, std::string_view key,
                       std::string_view value) {
  AttackConfig& a = config.attack;
  if (key == "beam_size") {
    a.beam_size = ParseSize(key, value);
  } else if (key == "max_iters") {
    a.max_iters = ParseSize(key, value);
  } else if (key == "alpha") {
    a.alpha = ParseDouble(key, value);
  } else if (key == "beta") {
    a.beta = ParseDouble(key, value);
  } else if (key == "epsilon") {
    a.epsilon = ParseDouble(key, value);
  } else if (key == "scoring") {
    a.scoring = ParseScoringMode(value);
  } else if (key == "search") {
    a.search = ParseSearchMode(value);
  } else if (key == "seed") {
    a.seed = ParseSize(key, value);
  } else if (key == "batch_size") {
    a.batch_size = ParseSize(key, value);
  } else if (key == "target") {
    config.target = std::string(value);
  } else if (key == "infiller") {
    config.infiller = std::string(value);
  } else if (key == "similarity") {
    config.similarity = std::string(value);
  } else if (key == "segment_policy") {
    config.segment_policy = ParseSegmentPolicy(value);
  } else if (key == "connection_limit") {
    config.connection_limit = ParseSize(key, value);
  } else {
    throw ConfigError("unknown config key: " + std::string(key));
  }
}

RunConfig ParseRunConfig(std::string_view text, RunConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    SetRunConfigValue(base, Trim(trimmed.substr(0, eq)),
                      Trim(trimmed.substr(eq + 1)));
  }
  return base;
}

RunConfig LoadRunConfig(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseRunConfig(buffer.str(), std::move(base));
}

}  // namespace beamattack
