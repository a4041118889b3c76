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

#ifndef BEAMATTACK_IO_H_
#define BEAMATTACK_IO_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "beamattack/types.h"

namespace beamattack {

// Which segment of a premise/hypothesis pair the attack may modify.
enum class SegmentPolicy { kFirst, kSecond, kLongest };

std::string_view ToString(SegmentPolicy policy);
// Throws ConfigError.
SegmentPolicy ParseSegmentPolicy(std::string_view name);

// One dataset line: {"id", "text": str | {"premise", "hypothesis"}, "label"}.
struct DatasetRecord {
  std::string id;
  // One entry for plain text, two for a premise/hypothesis pair.
  std::vector<std::string> segments;
  std::string label;

  bool operator==(const DatasetRecord&) const = default;
};

// Throws DataError naming the offending line or duplicate id.
std::vector<DatasetRecord> ReadDatasetRecords(std::istream& in);
std::vector<DatasetRecord> LoadDatasetRecords(const std::string& path);
std::string DatasetRecordToJson(const DatasetRecord& record);
void WriteDatasetRecords(std::ostream& out,
                         std::span<const DatasetRecord> records);

// Throws DataError naming the record id on an unknown label or empty text.
std::vector<Instance> ToInstances(std::span<const DatasetRecord> records,
                                  const LabelSet& labels,
                                  SegmentPolicy policy);
std::vector<Instance> LoadDataset(const std::string& path,
                                  const LabelSet& labels,
                                  SegmentPolicy policy);

// Corpus lines: {"id", "status", "label", "gold", "original", "adversarial"?,
// "path", "iterations", "queries", "raw_queries", "sim"?, "final_probs"?,
// "error"?}. Texts are {"segments": [str, ...], "perturbable": index}.
std::string CorpusRecordToJson(const AttackRecord& record,
                               const LabelSet& labels);
AttackRecord CorpusRecordFromJson(std::string_view line);
void WriteCorpus(std::ostream& out, std::span<const AttackRecord> records,
                 const LabelSet& labels);
std::vector<AttackRecord> ReadCorpus(std::istream& in);
std::vector<AttackRecord> LoadCorpus(const std::string& path);
// Gold label name of every corpus line, in order.
std::vector<std::string> ReadCorpusLabels(const std::string& path);

// Re-applies `path` to `original`.
TextSequence ReplayPath(const TextSequence& original,
                        std::span<const ActionStep> path);

// Original training records followed by one record per successful attack,
// carrying the adversarial text, the original's gold label, and the id
// suffixed with "-adv". Throws DataError on an id collision or a success
// whose id is not in `train`.
std::vector<DatasetRecord> ExportAdversarialTrainingSet(
    std::span<const DatasetRecord> train, std::span<const AttackRecord> corpus);

// Everything a run needs besides the dataset.
struct RunConfig {
  AttackConfig attack;
  std::string target;
  std::string infiller;
  std::string similarity = "jaccard";
  SegmentPolicy segment_policy = SegmentPolicy::kFirst;
  std::size_t connection_limit = 8;
};

// Flat "key = value" lines; '#' starts a comment. Keys: beam_size,
// max_iters, alpha, beta, epsilon, scoring, search, seed, target, infiller,
// similarity, segment_policy, batch_size, connection_limit. Values override
// `base`. Throws ConfigError.
RunConfig ParseRunConfig(std::string_view text, RunConfig base = {});
RunConfig LoadRunConfig(const std::string& path, RunConfig base = {});
// Applies one key; shared by the file parser and command-line overrides.
void SetRunConfigValue(RunConfig& config, std::string_view key,
                       std::string_view value);

}  // namespace beamattack

#endif  // BEAMATTACK_IO_H_
