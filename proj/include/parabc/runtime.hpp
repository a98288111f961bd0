// Copyright 2026 The parabc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "parabc/abc.hpp"

namespace parabc {

/// Many-producer single-consumer queue. pop() returns nullopt once every
/// producer has called close() and the queue is drained.
template <typename T>
class Channel {
 public:
  explicit Channel(std::size_t producers) : open_producers_(producers) {}

  void push(T value) {
    {
      std::lock_guard lock(mutex_);
      items_.push_back(std::move(value));
    }
    ready_.notify_one();
  }

  void close() {
    {
      std::lock_guard lock(mutex_);
      --open_producers_;
    }
    ready_.notify_all();
  }

  std::optional<T> pop() {
    std::unique_lock lock(mutex_);
    ready_.wait(lock, [&] { return !items_.empty() || open_producers_ == 0; });
    if (items_.empty()) return std::nullopt;
    T value = std::move(items_.front());
    items_.pop_front();
    return value;
  }

 private:
  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<T> items_;
  std::size_t open_producers_;
};

/// Runs the ABC loop on `config.num_workers` threads until the target is
/// reached. Output is identical to `infer` for any worker count.
InferenceResult run_parallel(const RunConfig& config, const ObservedSeries& obs);

/// Executes exactly `runs` batch runs (no target-based stopping).
InferenceResult run_fixed(const RunConfig& config, const ObservedSeries& obs,
                          std::size_t runs);

struct ScalingRow {
  std::size_t workers = 0;
  double time_per_run_ms = 0.0;  // mean simulation time of one batch run
  double time_per_run_std_ms = 0.0;
  double total_s = 0.0;  // mean over repetitions
  double total_std_s = 0.0;
  double speedup = 1.0;
  double overhead = 0.0;  // 1 - speedup / ideal_speedup
};

struct ScalingReport {
  std::size_t runs = 0;
  std::size_t repetitions = 0;
  std::size_t batch_size = 0;
  std::size_t chunk_size = 0;
  std::size_t hardware_threads = 0;
  std::vector<ScalingRow> rows;
  std::vector<std::string> warnings;

  std::string to_csv() const;
  std::string to_json() const;
};

struct BenchmarkOptions {
  std::size_t runs = 50;
  std::size_t repetitions = 5;
};

/// Times a fixed number of runs for each worker count; the first count is
/// the speedup baseline.
ScalingReport benchmark_scaling(const RunConfig& config,
                                const ObservedSeries& obs,
                                const std::vector<std::size_t>& worker_counts,
                                const BenchmarkOptions& options = {});

}  // namespace parabc
