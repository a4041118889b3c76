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

#ifndef BEAMATTACK_TOOLS_CLI_RUNNER_H_
#define BEAMATTACK_TOOLS_CLI_RUNNER_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "beamattack/actions.h"
#include "beamattack/types.h"

namespace beamattack::cli {

// Called on the calling thread once per record, in input order.
using RecordSink = std::function<void(std::size_t index, const AttackRecord&)>;

// Attacks every instance on a pool of `workers` threads. Records come back
// (and reach `sink`) in input order regardless of completion order.
// Throws ConfigError when workers is 0; rethrows the first unexpected
// exception raised by a worker.
std::vector<AttackRecord> AttackAll(std::span<const Instance> instances,
                                    const AttackConfig& config,
                                    const ModelSet& models,
                                    std::size_t workers,
                                    const RecordSink& sink = {});

std::size_t DefaultWorkers();

}  // namespace beamattack::cli

#endif  // BEAMATTACK_TOOLS_CLI_RUNNER_H_
