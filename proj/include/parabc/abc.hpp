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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "parabc/ingest.hpp"
#include "parabc/model.hpp"
#include "parabc/prior.hpp"

namespace parabc {

enum class FilterMode {
  kChunked,  // ship fixed-size chunks holding at least one acceptance
  kTopK,     // ship the k lowest distances of runs with acceptances
};

struct RunConfig {
  double tolerance = 2e5;
  std::size_t batch_size = 100000;
  std::size_t target_accepted = 100;
  std::size_t chunk_size = 10000;  // 0 ships the whole batch
  FilterMode filter_mode = FilterMode::kChunked;
  std::size_t top_k = 0;  // 0 picks the default for the tolerance
  std::size_t num_workers = 1;
  std::uint64_t seed = 0;
  std::size_t fit_days = 49;
  std::size_t max_runs = 100000;
  PriorSpec prior;
  GaussianSpread spread = GaussianSpread::kVarianceSqrtH;

  /// Throws ConfigError (or InvalidPrior) on an inconsistent configuration.
  void validate() const;

  /// top_k, or 5 above a tolerance of 5e4 and 1 at or below it.
  std::size_t effective_top_k() const noexcept;
};

struct PosteriorSample {
  ModelParams params;
  double distance = 0.0;
  std::size_t run_index = 0;
  std::size_t in_batch_index = 0;

  friend bool operator==(const PosteriorSample&, const PosteriorSample&) = default;
};

struct RunStats {
  std::size_t runs_executed = 0;
  std::size_t samples_simulated = 0;
  std::size_t samples_accepted = 0;  // counted before any filter truncation
  std::size_t samples_returned = 0;
  double acceptance_rate = 0.0;
  double wall_time_total_s = 0.0;
  double wall_time_per_run_mean_s = 0.0;
  double wall_time_per_run_std_s = 0.0;
  double host_postprocess_s = 0.0;
  std::size_t samples_transferred = 0;  // samples shipped through the filter
  std::size_t truncation_loss = 0;
  std::size_t num_workers = 1;
};

/// The fitting target: observed window plus what is needed to initialize
/// each simulation.
struct FitTarget {
  ObservedArray observed;
  DayZero day0;
  double population = 0.0;

  static FitTarget from_series(const ObservedSeries& series,
                               std::size_t fit_days);
};

/// Everything one batch run produces before filtering.
struct BatchResult {
  std::size_t run_index = 0;
  std::vector<ModelParams> params;
  std::vector<double> distances;
  std::vector<std::uint8_t> accepted;

  std::size_t size() const noexcept { return params.size(); }
  std::size_t accepted_count() const noexcept;
};

/// Half-open index range [begin, end) into a batch.
struct ChunkRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const ChunkRange&, const ChunkRange&) = default;
};

struct TopKResult {
  std::vector<std::size_t> indices;  // ascending by (distance, index)
  std::size_t accepted_count = 0;
};

/// Samples shipped from the simulation stage to host post-processing.
struct Shipment {
  std::size_t run_index = 0;
  std::size_t batch_size = 0;
  std::size_t accepted_count = 0;
  std::vector<PosteriorSample> candidates;
  double run_seconds = 0.0;
};

enum class InferenceStatus { kCompleted, kMaxRunsExceeded };

struct InferenceResult {
  InferenceStatus status = InferenceStatus::kCompleted;
  std::vector<PosteriorSample> samples;  // sorted by (run, in-batch index)
  RunStats stats;
};

/// Global sample id; substreams are keyed by it.
inline std::uint64_t sample_id(std::size_t run_index, std::size_t in_batch_index,
                               std::size_t batch_size) noexcept {
  return static_cast<std::uint64_t>(run_index) * batch_size + in_batch_index;
}

double euclidean_distance(std::span<const double> simulated,
                          std::span<const double> observed);
double euclidean_distance(const ObservedArray& simulated,
                          const ObservedArray& observed);

/// Draws, simulates and scores one sample with its global id.
PosteriorSample evaluate_sample(const RunConfig& config, const FitTarget& target,
                                std::uint64_t global_id);

BatchResult run_batch(const RunConfig& config, const FitTarget& target,
                      std::size_t run_index);
BatchResult run_batch(const RunConfig& config, const ObservedSeries& obs,
                      std::size_t run_index);

/// Chunks that contain at least one accepted sample, in order.
std::vector<ChunkRange> chunk_filter(const BatchResult& batch,
                                     std::size_t chunk_size);

TopKResult top_k_filter(const BatchResult& batch, std::size_t k);

/// Applies the configured filter to a batch.
Shipment ship_batch(const BatchResult& batch, const RunConfig& config);

/// Host-side selection of candidates within tolerance.
std::vector<PosteriorSample> host_filter(const Shipment& shipment,
                                         double tolerance);

/// Every accepted sample of a batch, with no filtering.
std::vector<PosteriorSample> accepted_samples(const BatchResult& batch);

/// Single-threaded batched ABC rejection.
InferenceResult infer(const RunConfig& config, const ObservedSeries& obs);

/// One-sample-at-a-time rejection over the same flattened sample order;
/// stopping is checked at the same run boundaries as `infer`.
InferenceResult infer_sequential_oracle(const RunConfig& config,
                                        const ObservedSeries& obs);

/// Fills the derived fields: acceptance rate and per-run time mean/std.
void finalize_stats(RunStats& stats, std::span<const double> run_seconds);

}  // namespace parabc
