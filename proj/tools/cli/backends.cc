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

#include "cli/backends.h"

#include "beamattack/errors.h"

namespace beamattack::cli {
namespace {

constexpr std::string_view kScripted = "builtin:scripted:";
constexpr std::string_view kKeyword = "builtin:keyword:";
constexpr std::string_view kTable = "builtin:table:";
constexpr std::string_view kEmbed = "embed:";

HttpOptions Http(std::string_view spec, std::size_t connection_limit) {
  HttpOptions options;
  options.endpoint = std::string(spec);
  options.connection_limit = connection_limit;
  return options;
}

// Loader failures on builtin fixtures are configuration problems.
template <typename Fn>
auto LoadOrConfigError(Fn&& load) {
  try {
    return load();
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

bool IsHttpSpec(std::string_view spec) {
  return spec.starts_with("http://") || spec.starts_with("https://");
}

std::unique_ptr<TargetModel> MakeTarget(std::string_view spec,
                                        std::size_t connection_limit,
                                        std::size_t batch_limit) {
  if (spec.starts_with(kScripted)) {
    std::string path(spec.substr(kScripted.size()));
    return LoadOrConfigError([&] {
      return std::make_unique<ScriptedOracle>(LoadScriptedOracle(path));
    });
  }
  if (spec.starts_with(kKeyword)) {
    std::string path(spec.substr(kKeyword.size()));
    return LoadOrConfigError([&] {
      return std::make_unique<KeywordSoftmaxClassifier>(
          LoadKeywordClassifier(path));
    });
  }
  if (IsHttpSpec(spec)) {
    HttpOptions options = Http(spec, connection_limit);
    options.batch_limit = batch_limit;
    return std::make_unique<HttpTarget>(options);
  }
  throw ConfigError("unrecognized target: " + std::string(spec));
}

std::unique_ptr<Infiller> MakeInfiller(std::string_view spec,
                                       std::size_t connection_limit) {
  if (spec.starts_with(kTable)) {
    std::string path(spec.substr(kTable.size()));
    return LoadOrConfigError([&] {
      return std::make_unique<TableInfiller>(LoadTableInfiller(path));
    });
  }
  if (IsHttpSpec(spec)) {
    return std::make_unique<HttpInfiller>(Http(spec, connection_limit));
  }
  throw ConfigError("unrecognized infiller: " + std::string(spec));
}

std::unique_ptr<Similarity> MakeSimilarity(std::string_view spec,
                                           std::size_t connection_limit) {
  if (spec == "jaccard") return std::make_unique<JaccardSimilarity>();
  if (spec.starts_with(kEmbed)) {
    std::string path(spec.substr(kEmbed.size()));
    return LoadOrConfigError([&] {
      return std::make_unique<EmbeddingSimilarity>(LoadEmbeddingTable(path));
    });
  }
  if (IsHttpSpec(spec)) {
    return std::make_unique<HttpSimilarity>(Http(spec, connection_limit));
  }
  throw ConfigError("unrecognized similarity: " + std::string(spec));
}

Backends MakeBackends(const RunConfig& config) {
  if (config.target.empty()) throw ConfigError("no target configured");
  if (config.infiller.empty()) throw ConfigError("no infiller configured");
  Backends backends;
  backends.target = MakeTarget(config.target, config.connection_limit,
                               config.attack.batch_size);
  backends.infiller = MakeInfiller(config.infiller, config.connection_limit);
  backends.similarity =
      MakeSimilarity(config.similarity, config.connection_limit);
  return backends;
}

}  // namespace beamattack::cli
