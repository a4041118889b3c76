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

#ifndef BEAMATTACK_TESTS_TESTING_LOOPBACK_SERVER_H_
#define BEAMATTACK_TESTS_TESTING_LOOPBACK_SERVER_H_

#include <atomic>
#include <functional>
#include <memory>
#include <string>

#include "beamattack/models.h"

namespace beamattack::testing {

// Serves in-process models over the JSON protocol on 127.0.0.1 with a
// random port. Null models leave their routes unregistered (404).
class LoopbackServer {
 public:
  struct Models {
    const TargetModel* target = nullptr;
    const Infiller* infiller = nullptr;
    const Similarity* similarity = nullptr;
    // Per-text scores for /perplexity and /grammar.
    std::function<double(const std::string&)> perplexity;
    std::function<double(const std::string&)> grammar;
  };

  explicit LoopbackServer(Models models);
  ~LoopbackServer();

  std::string url() const;

  // The next `n` requests of any kind fail with HTTP `status`.
  void FailNext(int n, int status);
  // Replaces every /classify reply body.
  void OverrideClassify(std::string body);

  int requests() const { return requests_.load(); }
  int classify_requests() const { return classify_requests_.load(); }
  // Largest number of texts seen in one /classify request.
  int max_classify_batch() const { return max_batch_.load(); }
  // Largest number of requests handled at once.
  int max_in_flight() const { return max_in_flight_.load(); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::atomic<int> requests_{0};
  std::atomic<int> classify_requests_{0};
  std::atomic<int> max_batch_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
};

}  // namespace beamattack::testing

#endif  // BEAMATTACK_TESTS_TESTING_LOOPBACK_SERVER_H_
