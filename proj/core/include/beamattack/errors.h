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

#ifndef BEAMATTACK_ERRORS_H_
#define BEAMATTACK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace beamattack {

// Malformed configuration or invalid command-line values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A model backend failed (network, timeout, or an exception inside a builtin).
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A backend answered, but the payload violates the wire protocol.
class ProtocolError : public BackendError {
 public:
  using BackendError::BackendError;
};

// Dataset, corpus or fixture file cannot be parsed.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Aggregate metric requested over an empty population.
class UndefinedMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace beamattack

#endif  // BEAMATTACK_ERRORS_H_
