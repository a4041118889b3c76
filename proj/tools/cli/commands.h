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

#ifndef BEAMATTACK_TOOLS_CLI_COMMANDS_H_
#define BEAMATTACK_TOOLS_CLI_COMMANDS_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace beamattack::cli {

inline constexpr int kExitOk = 0;
// Bad flags, config values or input files.
inline constexpr int kExitConfig = 1;
// Unreachable or misbehaving backend, including per-record backend errors.
inline constexpr int kExitBackend = 2;

// Entry point behind main(). `args` excludes the program name. Machine
// readable output goes to `out`, progress and diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace beamattack::cli

#endif  // BEAMATTACK_TOOLS_CLI_COMMANDS_H_
