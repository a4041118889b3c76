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

#include "beamattack/metrics.h"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "beamattack/actions.h"
#include "beamattack/errors.h"
#include "json.hpp"

namespace beamattack {
namespace {

std::vector<const AttackRecord*> Successes(
    std::span<const AttackRecord> records) {
  std::vector<const AttackRecord*> out;
  for (const auto& r : records) {
    if (r.success() && r.adversarial) out.push_back(&r);
  }
  return out;
}

std::string Cell(const std::optional<double>& value, const char* format) {
  if (!value) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, *value);
  return buf;
}

}  // namespace

double AttackSuccessRate(std::span<const AttackRecord> records) {
  std::size_t attacked = 0;
  std::size_t successes = 0;
  for (const auto& r : records) {
    if (!r.attacked()) continue;
    ++attacked;
    if (r.success()) ++successes;
  }
  if (attacked == 0) {
    throw UndefinedMetricError("attack success rate: nothing attacked");
  }
  return static_cast<double>(successes) / static_cast<double>(attacked);
}

double ModificationRate(const AttackRecord& record) {
  if (!record.success()) {
    throw std::invalid_argument("modification rate needs a success record");
  }
  TextSequence current = record.original;
  std::size_t modified = 0;
  for (const ActionStep& step : record.path) {
    if (step.kind == ActionKind::kMerge && step.position < current.size()) {
      const Tokens& t = current.tokens();
      bool preserved = step.token == t[step.position - 1] ||
                       step.token == t[step.position];
      modified += preserved ? 1 : 2;
    } else {
      modified += 1;
    }
    current = ApplyAction(current, step);
  }
  return static_cast<double>(modified) /
         static_cast<double>(record.original.size());
}

double TransferAccuracy(std::span<const AttackRecord> records,
                        const TargetModel& other) {
  auto successes = Successes(records);
  if (successes.empty()) {
    throw UndefinedMetricError("transfer accuracy: no adversarial examples");
  }
  std::vector<TextSequence> texts;
  texts.reserve(successes.size());
  for (const auto* r : successes) texts.push_back(*r->adversarial);
  auto dists = other.Classify(texts);
  if (dists.size() != texts.size()) {
    throw ProtocolError("target returned wrong number of distributions");
  }
  std::size_t still_correct = 0;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (!IsFooled(dists[i], successes[i]->gold)) ++still_correct;
  }
  return static_cast<double>(still_correct) /
         static_cast<double>(successes.size());
}

DelegatedQuality ComputeDelegatedQuality(std::span<const AttackRecord> records,
                                         const TextScorer* perplexity,
                                         const TextScorer* grammar) {
  DelegatedQuality out;
  auto successes = Successes(records);
  if (successes.empty()) return out;
  std::vector<std::string> adversarial;
  std::vector<std::string> original;
  for (const auto* r : successes) {
    adversarial.push_back(r->adversarial->Text());
    original.push_back(r->original.Text());
  }
  if (perplexity != nullptr) {
    try {
      auto ppl = perplexity->Score(adversarial);
      double sum = 0.0;
      for (double v : ppl) sum += v;
      out.ppl_mean = sum / static_cast<double>(ppl.size());
    } catch (const BackendError& e) {
      out.warnings.push_back(std::string("perplexity unavailable: ") +
                             e.what());
    }
  }
  if (grammar != nullptr) {
    try {
      auto adv_errors = grammar->Score(adversarial);
      auto orig_errors = grammar->Score(original);
      double sum = 0.0;
      for (std::size_t i = 0; i < adv_errors.size(); ++i) {
        sum += adv_errors[i] - orig_errors[i];
      }
      out.gerr_mean = sum / static_cast<double>(adv_errors.size());
    } catch (const BackendError& e) {
      out.warnings.push_back(std::string("grammar unavailable: ") + e.what());
    }
  }
  return out;
}

MetricsReport ComputeReport(std::span<const AttackRecord> records,
                            const TextScorer* perplexity,
                            const TextScorer* grammar) {
  MetricsReport report;
  double queries = 0.0;
  double mod_sum = 0.0;
  double sim_sum = 0.0;
  for (const auto& r : records) {
    if (!r.attacked()) {
      ++report.skipped_count;
      continue;
    }
    ++report.attacked_count;
    queries += static_cast<double>(r.query_count);
    if (r.success()) {
      ++report.success_count;
      mod_sum += ModificationRate(r);
      sim_sum += r.similarity.value_or(0.0);
    }
  }
  if (report.attacked_count > 0) {
    report.a_rate = AttackSuccessRate(records);
    report.query_mean = queries / static_cast<double>(report.attacked_count);
  }
  if (report.success_count > 0) {
    auto n = static_cast<double>(report.success_count);
    report.mod_rate = mod_sum / n;
    report.sim_mean = sim_sum / n;
  }
  DelegatedQuality quality =
      ComputeDelegatedQuality(records, perplexity, grammar);
  report.ppl_mean = quality.ppl_mean;
  report.gerr_mean = quality.gerr_mean;
  report.warnings = std::move(quality.warnings);
  return report;
}

std::string ReportToJson(const MetricsReport& report) {
  nlohmann::ordered_json doc;
  doc["attacked_count"] = report.attacked_count;
  doc["skipped_count"] = report.skipped_count;
  doc["success_count"] = report.success_count;
  auto put = [&](const char* key, const std::optional<double>& value) {
    if (value) doc[key] = *value;
  };
  put("a_rate", report.a_rate);
  put("mod_rate", report.mod_rate);
  put("sim_mean", report.sim_mean);
  put("ppl_mean", report.ppl_mean);
  put("gerr_mean", report.gerr_mean);
  put("query_mean", report.query_mean);
  put("transfer_accuracy", report.transfer_accuracy);
  if (!report.warnings.empty()) doc["warnings"] = report.warnings;
  return doc.dump(2) + "\n";
}

std::string FormatReportTable(const MetricsReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %-8s %-6s %-8s %-6s %-8s",
                "A-rate", "Mod", "Sim", "PPL", "GErr", "Queries");
  out << line;
  if (report.transfer_accuracy) out << " Transfer";
  out << '\n';
  auto pct = [](const std::optional<double>& v) {
    return v ? std::optional<double>(*v * 100.0) : std::nullopt;
  };
  std::snprintf(line, sizeof(line), "%-8s %-8s %-6s %-8s %-6s %-8s",
                Cell(pct(report.a_rate), "%.1f%%").c_str(),
                Cell(pct(report.mod_rate), "%.1f%%").c_str(),
                Cell(report.sim_mean, "%.2f").c_str(),
                Cell(report.ppl_mean, "%.1f").c_str(),
                Cell(report.gerr_mean, "%.2f").c_str(),
                Cell(report.query_mean, "%.1f").c_str());
  out << line;
  if (report.transfer_accuracy) {
    out << ' ' << Cell(pct(report.transfer_accuracy), "%.1f%%");
  }
  out << '\n';
  return out.str();
}

}  // namespace beamattack
