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

#include "cli/runner.h"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "beamattack/errors.h"
#include "beamattack/search.h"

namespace beamattack::cli {

std::size_t DefaultWorkers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<AttackRecord> AttackAll(std::span<const Instance> instances,
                                    const AttackConfig& config,
                                    const ModelSet& models,
                                    std::size_t workers,
                                    const RecordSink& sink) {
  if (workers == 0) throw ConfigError("workers must be at least 1");
  config.Validate();
  const std::size_t n = instances.size();
  std::vector<std::optional<AttackRecord>> slots(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex mu;
  std::condition_variable ready;
  std::exception_ptr failure;

  auto work = [&] {
    while (!abort.load()) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        AttackRecord record = Attack(instances[i], config, models);
        std::lock_guard lock(mu);
        slots[i] = std::move(record);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        abort.store(true);
      }
      ready.notify_all();
    }
  };

  std::vector<std::jthread> pool;
  const std::size_t threads = std::min(workers, std::max<std::size_t>(n, 1));
  for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work);

  // Single ordered writer: hand records to the sink as the prefix fills in.
  std::vector<AttackRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::unique_lock lock(mu);
    ready.wait(lock, [&] { return slots[i].has_value() || failure; });
    if (failure) break;
    records.push_back(std::move(*slots[i]));
    lock.unlock();
    if (sink) sink(i, records.back());
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return records;
}

}  // namespace beamattack::cli
