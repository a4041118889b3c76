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

#ifndef BEAMATTACK_METRICS_H_
#define BEAMATTACK_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beamattack/http_models.h"
#include "beamattack/models.h"
#include "beamattack/types.h"

namespace beamattack {

// Aggregates over a corpus. Rates that need a non-empty population are
// absent when the population is empty. Mod, Sim, PPL and GErr are averaged
// over successful attacks only; queries over attacked records.
struct MetricsReport {
  std::size_t attacked_count = 0;
  std::size_t skipped_count = 0;
  std::size_t success_count = 0;
  std::optional<double> a_rate;
  std::optional<double> mod_rate;
  std::optional<double> sim_mean;
  std::optional<double> ppl_mean;
  std::optional<double> gerr_mean;
  std::optional<double> query_mean;
  std::optional<double> transfer_accuracy;
  std::vector<std::string> warnings;

  bool operator==(const MetricsReport&) const = default;
};

// successes / attacked; skipped records count in neither. Throws
// UndefinedMetricError when nothing was attacked.
double AttackSuccessRate(std::span<const AttackRecord> records);

// Modified tokens over the original length n. Replace and Insert count one
// token each; a Merge counts one when its substitute equals one of the two
// merged tokens and two otherwise; a Merge at the last position counts one.
// Throws std::invalid_argument for records that are not successes.
double ModificationRate(const AttackRecord& record);

// Fraction of successful adversarial examples that `other` still assigns to
// the gold label. Lower means better transfer. Throws UndefinedMetricError
// on a corpus without successes.
double TransferAccuracy(std::span<const AttackRecord> records,
                        const TargetModel& other);

struct DelegatedQuality {
  std::optional<double> ppl_mean;
  std::optional<double> gerr_mean;
  std::vector<std::string> warnings;
};

// Mean perplexity of the adversarial texts and mean grammar-error increase
// (errors(adversarial) - errors(original)). A null or failing scorer leaves
// its field absent and records a warning.
DelegatedQuality ComputeDelegatedQuality(std::span<const AttackRecord> records,
                                         const TextScorer* perplexity,
                                         const TextScorer* grammar);

MetricsReport ComputeReport(std::span<const AttackRecord> records,
                            const TextScorer* perplexity = nullptr,
                            const TextScorer* grammar = nullptr);

std::string ReportToJson(const MetricsReport& report);
// Columns: A-rate, Mod, Sim, PPL, GErr, Queries (plus Transfer when set).
std::string FormatReportTable(const MetricsReport& report);

}  // namespace beamattack

#endif  // BEAMATTACK_METRICS_H_
