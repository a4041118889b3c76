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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "beamattack/errors.h"
#include "json.hpp"

namespace beamattack {
namespace {

using nlohmann::json;

std::string NormalizeKey(std::string_view text) {
  return JoinTokens(Tokenize(text));
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json ParseJson(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

ProbDist ToDist(const json& value, std::size_t expected,
                std::string_view what) {
  try {
    auto probs = value.get<std::vector<double>>();
    if (probs.size() != expected) {
      throw DataError(std::string(what) + ": distribution length mismatch");
    }
    return ProbDist(std::move(probs));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string(what) + ": " + e.what());
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

std::vector<InfillProposal> ToProposals(const json& list) {
  std::vector<InfillProposal> proposals;
  for (const auto& item : list) {
    if (!item.is_array() || item.size() != 2) {
      throw DataError("infiller table: proposals must be [token, prob] pairs");
    }
    InfillProposal p{item[0].get<std::string>(), item[1].get<double>()};
    if (!(p.prob > 0.0 && p.prob <= 1.0)) {
      throw DataError("infiller table: probability outside (0, 1]");
    }
    proposals.push_back(std::move(p));
  }
  return proposals;
}

}  // namespace

ScriptedOracle::ScriptedOracle(LabelSet labels, ProbDist default_dist)
    : labels_(std::move(labels)), default_dist_(std::move(default_dist)) {
  if (default_dist_.size() != labels_.size()) {
    throw std::invalid_argument("default distribution length mismatch");
  }
}

void ScriptedOracle::Set(std::string_view text, ProbDist dist) {
  if (dist.size() != labels_.size()) {
    throw std::invalid_argument("distribution length mismatch");
  }
  table_.insert_or_assign(NormalizeKey(text), std::move(dist));
}

std::vector<ProbDist> ScriptedOracle::Classify(
    std::span<const TextSequence> texts) const {
  std::vector<ProbDist> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    auto it = table_.find(text.Text());
    out.push_back(it == table_.end() ? default_dist_ : it->second);
  }
  return out;
}

KeywordSoftmaxClassifier::KeywordSoftmaxClassifier(
    LabelSet labels, std::vector<WeightTable> weights, double temperature,
    std::vector<double> bias)
    : labels_(std::move(labels)),
      weights_(std::move(weights)),
      temperature_(temperature),
      bias_(std::move(bias)) {
  if (weights_.size() != labels_.size()) {
    throw std::invalid_argument("one weight table per label required");
  }
  if (!(temperature_ > 0.0)) {
    throw std::invalid_argument("temperature must be positive");
  }
  if (bias_.empty()) bias_.assign(labels_.size(), 0.0);
  if (bias_.size() != labels_.size()) {
    throw std::invalid_argument("bias length mismatch");
  }
}

ProbDist KeywordSoftmaxClassifier::ClassifyOne(const TextSequence& text) const {
  std::vector<double> logits = bias_;
  for (const auto& segment : text.segments()) {
    for (const auto& token : segment) {
      for (std::size_t c = 0; c < weights_.size(); ++c) {
        auto it = weights_[c].find(token);
        if (it != weights_[c].end()) logits[c] += it->second;
      }
    }
  }
  double max_logit = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp((l - max_logit) / temperature_);
    total += l;
  }
  for (double& l : logits) l /= total;
  return ProbDist(std::move(logits));
}

std::vector<ProbDist> KeywordSoftmaxClassifier::Classify(
    std::span<const TextSequence> texts) const {
  std::vector<ProbDist> out;
  out.reserve(texts.size());
  for (const auto& text : texts) out.push_back(ClassifyOne(text));
  return out;
}

void TableInfiller::SetExact(std::string_view masked_text,
                             std::vector<InfillProposal> proposals) {
  exact_.insert_or_assign(NormalizeKey(masked_text), std::move(proposals));
}

void TableInfiller::SetContext(std::string_view left_token,
                               std::vector<InfillProposal> proposals) {
  context_.insert_or_assign(std::string(left_token), std::move(proposals));
}

std::vector<InfillProposal> TableInfiller::Propose(const MaskedSequence& masked,
                                                   double min_prob) const {
  const std::vector<InfillProposal>* source = nullptr;
  if (auto it = exact_.find(JoinTokens(masked.tokens)); it != exact_.end()) {
    source = &it->second;
  } else {
    std::string key = masked.mask_index == 0
                          ? std::string(kStartKey)
                          : masked.tokens[masked.mask_index - 1];
    if (auto ctx = context_.find(key); ctx != context_.end()) {
      source = &ctx->second;
    }
  }
  std::vector<InfillProposal> out;
  if (source == nullptr) return out;
  for (const auto& p : *source) {
    if (p.prob > min_prob) out.push_back(p);
  }
  return out;
}

double JaccardSimilarity::Score(const TextSequence& a,
                                const TextSequence& b) const {
  std::map<std::string_view, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& t : a.tokens()) ++counts[t].first;
  for (const auto& t : b.tokens()) ++counts[t].second;
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (const auto& [token, c] : counts) {
    inter += std::min(c.first, c.second);
    uni += std::max(c.first, c.second);
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

CosineResult EmbeddingCosineSimilarity(const Tokens& a, const Tokens& b,
                                       const EmbeddingTable& table) {
  std::size_t dim = table.empty() ? 0 : table.begin()->second.size();
  auto pool = [&](const Tokens& tokens, bool& any_known) {
    std::vector<double> mean(dim, 0.0);
    any_known = false;
    for (const auto& t : tokens) {
      auto it = table.find(t);
      if (it == table.end()) continue;
      any_known = true;
      for (std::size_t d = 0; d < dim; ++d) mean[d] += it->second[d];
    }
    if (!tokens.empty()) {
      for (double& v : mean) v /= static_cast<double>(tokens.size());
    }
    return mean;
  };
  bool known_a = false;
  bool known_b = false;
  auto va = pool(a, known_a);
  auto vb = pool(b, known_b);
  if (!known_a && !known_b) return {0.0, true};
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    dot += va[d] * vb[d];
    na += va[d] * va[d];
    nb += vb[d] * vb[d];
  }
  if (na == 0.0 || nb == 0.0) return {0.0, false};
  double cosine = dot / (std::sqrt(na) * std::sqrt(nb));
  return {std::clamp(cosine, 0.0, 1.0), false};
}

EmbeddingSimilarity::EmbeddingSimilarity(EmbeddingTable table)
    : table_(std::move(table)) {
  std::size_t dim = table_.empty() ? 0 : table_.begin()->second.size();
  for (const auto& [word, vec] : table_) {
    if (vec.size() != dim) {
      throw std::invalid_argument("embedding dimension mismatch at " + word);
    }
  }
}

double EmbeddingSimilarity::Score(const TextSequence& a,
                                  const TextSequence& b) const {
  // Identical texts are similar even when entirely out of vocabulary.
  if (a.tokens() == b.tokens()) return 1.0;
  CosineResult r = EmbeddingCosineSimilarity(a.tokens(), b.tokens(), table_);
  if (r.all_oov) oov_warnings_.fetch_add(1);
  return r.score;
}

CachingTarget::CachingTarget(const TargetModel& inner) : inner_(inner) {}

std::vector<ProbDist> CachingTarget::Classify(
    std::span<const TextSequence> texts) const {
  std::vector<TextSequence> misses;
  {
    std::lock_guard<std::mutex> lock(mu_);
    raw_queries_ += texts.size();
    for (const auto& t : texts) {
      if (!cache_.contains(t) &&
          std::find(misses.begin(), misses.end(), t) == misses.end()) {
        misses.push_back(t);
      }
    }
  }
  if (!misses.empty()) {
    auto dists = inner_.Classify(misses);
    if (dists.size() != misses.size()) {
      throw ProtocolError("target returned wrong number of distributions");
    }
    std::lock_guard<std::mutex> lock(mu_);
    for (std::size_t i = 0; i < misses.size(); ++i) {
      cache_.emplace(std::move(misses[i]), std::move(dists[i]));
    }
  }
  std::vector<ProbDist> out;
  out.reserve(texts.size());
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& t : texts) out.push_back(cache_.at(t));
  return out;
}

std::size_t CachingTarget::unique_queries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.size();
}

std::size_t CachingTarget::raw_queries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return raw_queries_;
}

ScriptedOracle ParseScriptedOracle(std::string_view text) {
  json doc = ParseJson(text, "scripted oracle");
  try {
    LabelSet labels(doc.at("labels").get<std::vector<std::string>>());
    ScriptedOracle oracle(labels,
                          ToDist(doc.at("default"), labels.size(), "default"));
    for (const auto& entry : doc.value("entries", json::array())) {
      auto key = entry.at("text").get<std::string>();
      oracle.Set(key, ToDist(entry.at("probs"), labels.size(), key));
    }
    return oracle;
  } catch (const json::exception& e) {
    throw DataError(std::string("scripted oracle: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("scripted oracle: ") + e.what());
  }
}

ScriptedOracle LoadScriptedOracle(const std::string& path) {
  return ParseScriptedOracle(ReadFile(path));
}

KeywordSoftmaxClassifier ParseKeywordClassifier(std::string_view text) {
  json doc = ParseJson(text, "keyword classifier");
  try {
    LabelSet labels(doc.at("labels").get<std::vector<std::string>>());
    std::vector<KeywordSoftmaxClassifier::WeightTable> weights(labels.size());
    std::vector<double> bias(labels.size(), 0.0);
    const json& w = doc.at("weights");
    for (std::size_t c = 0; c < labels.size(); ++c) {
      if (w.contains(labels.name(c))) {
        weights[c] = w.at(labels.name(c))
                         .get<KeywordSoftmaxClassifier::WeightTable>();
      }
      if (doc.contains("bias")) {
        bias[c] = doc["bias"].value(labels.name(c), 0.0);
      }
    }
    return KeywordSoftmaxClassifier(labels, std::move(weights),
                                    doc.value("temperature", 1.0),
                                    std::move(bias));
  } catch (const json::exception& e) {
    throw DataError(std::string("keyword classifier: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("keyword classifier: ") + e.what());
  }
}

KeywordSoftmaxClassifier LoadKeywordClassifier(const std::string& path) {
  return ParseKeywordClassifier(ReadFile(path));
}

TableInfiller ParseTableInfiller(std::string_view text) {
  json doc = ParseJson(text, "infiller table");
  TableInfiller infiller;
  try {
    const json exact = doc.value("exact", json::object());
    const json context = doc.value("context", json::object());
    for (const auto& [key, list] : exact.items()) {
      infiller.SetExact(key, ToProposals(list));
    }
    for (const auto& [key, list] : context.items()) {
      infiller.SetContext(key, ToProposals(list));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("infiller table: ") + e.what());
  }
  return infiller;
}

TableInfiller LoadTableInfiller(const std::string& path) {
  return ParseTableInfiller(ReadFile(path));
}

EmbeddingTable ParseEmbeddingTable(std::string_view text) {
  EmbeddingTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    Tokens fields = Tokenize(line);
    if (fields.empty()) continue;
    std::vector<double> vec;
    try {
      for (std::size_t i = 1; i < fields.size(); ++i) {
        vec.push_back(std::stod(fields[i]));
      }
    } catch (const std::exception&) {
      throw DataError("embeddings line " + std::to_string(line_no) +
                      ": bad number");
    }
    if (vec.empty() || (dim != 0 && vec.size() != dim)) {
      throw DataError("embeddings line " + std::to_string(line_no) +
                      ": dimension mismatch");
    }
    dim = vec.size();
    table.insert_or_assign(fields[0], std::move(vec));
  }
  return table;
}

EmbeddingTable LoadEmbeddingTable(const std::string& path) {
  return ParseEmbeddingTable(ReadFile(path));
}

}  // namespace beamattack
