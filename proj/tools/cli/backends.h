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

#ifndef BEAMATTACK_TOOLS_CLI_BACKENDS_H_
#define BEAMATTACK_TOOLS_CLI_BACKENDS_H_

#include <memory>
#include <string>
#include <string_view>

#include "beamattack/actions.h"
#include "beamattack/http_models.h"
#include "beamattack/io.h"
#include "beamattack/models.h"

namespace beamattack::cli {

// Target:    builtin:scripted:<file> | builtin:keyword:<file> | http(s)://...
// Infiller:  builtin:table:<file> | http(s)://...
// Similarity: jaccard | embed:<file> | http(s)://...
// Malformed specs and unreadable files throw ConfigError.
std::unique_ptr<TargetModel> MakeTarget(std::string_view spec,
                                        std::size_t connection_limit,
                                        std::size_t batch_limit);
std::unique_ptr<Infiller> MakeInfiller(std::string_view spec,
                                       std::size_t connection_limit);
std::unique_ptr<Similarity> MakeSimilarity(std::string_view spec,
                                           std::size_t connection_limit);

bool IsHttpSpec(std::string_view spec);

struct Backends {
  std::unique_ptr<TargetModel> target;
  std::unique_ptr<Infiller> infiller;
  std::unique_ptr<Similarity> similarity;

  ModelSet models() const { return {*target, *infiller, *similarity}; }
};

Backends MakeBackends(const RunConfig& config);

}  // namespace beamattack::cli

#endif  // BEAMATTACK_TOOLS_CLI_BACKENDS_H_
