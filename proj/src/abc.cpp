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

#include "parabc/abc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "parabc/errors.hpp"

namespace parabc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

PosteriorSample make_sample(const BatchResult& batch, std::size_t index) {
  return {batch.params[index], batch.distances[index], batch.run_index, index};
}

}  // namespace

void RunConfig::validate() const {
  if (!(tolerance >= 0.0)) {
    throw ConfigError("abc.tolerance must be non-negative");
  }
  if (batch_size < 1) throw ConfigError("abc.batch_size must be at least 1");
  if (target_accepted < 1) {
    throw ConfigError("abc.target_accepted must be at least 1");
  }
  if (chunk_size != 0 && batch_size % chunk_size != 0) {
    throw ConfigError("abc.chunk_size (" + std::to_string(chunk_size) +
                      ") must divide abc.batch_size (" +
                      std::to_string(batch_size) + ")");
  }
  if (filter_mode == FilterMode::kTopK && effective_top_k() > batch_size) {
    throw ConfigError("abc.top_k must not exceed abc.batch_size");
  }
  if (num_workers < 1) throw ConfigError("runtime.workers must be at least 1");
  if (fit_days < 1) throw ConfigError("abc.fit_days must be at least 1");
  if (max_runs < 1) throw ConfigError("abc.max_runs must be at least 1");
  prior.validate();
}

std::size_t RunConfig::effective_top_k() const noexcept {
  if (top_k != 0) return top_k;
  return tolerance <= 5e4 ? 1 : 5;
}

FitTarget FitTarget::from_series(const ObservedSeries& series,
                                 std::size_t fit_days) {
  return {series.window(fit_days), series.day0(), series.population};
}

std::size_t BatchResult::accepted_count() const noexcept {
  return static_cast<std::size_t>(
      std::count(accepted.begin(), accepted.end(), std::uint8_t{1}));
}

double euclidean_distance(std::span<const double> simulated,
                          std::span<const double> observed) {
  if (simulated.size() != observed.size()) {
    throw ShapeMismatch("distance between arrays of " +
                        std::to_string(simulated.size()) + " and " +
                        std::to_string(observed.size()) + " elements");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < simulated.size(); ++i) {
    const double diff = simulated[i] - observed[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

double euclidean_distance(const ObservedArray& simulated,
                          const ObservedArray& observed) {
  if (simulated.days() != observed.days()) {
    throw ShapeMismatch("distance between " + std::to_string(simulated.days()) +
                        "-day and " + std::to_string(observed.days()) +
                        "-day arrays");
  }
  return euclidean_distance(simulated.values(), observed.values());
}

PosteriorSample evaluate_sample(const RunConfig& config, const FitTarget& target,
                                std::uint64_t global_id) {
  PosteriorSample sample;
  sample.params = sample_prior_one(config.prior, config.seed, global_id);
  const EpidemicState init =
      init_state(target.day0, sample.params.kappa, target.population);
  RandomStream rng(config.seed, StreamDomain::kSimulation, global_id);
  ObservedArray simulated(target.observed.days());
  simulate_observed(sample.params, init, target.population, rng, config.spread,
                    simulated);
  sample.distance = euclidean_distance(simulated, target.observed);
  sample.run_index = static_cast<std::size_t>(global_id / config.batch_size);
  sample.in_batch_index = static_cast<std::size_t>(global_id % config.batch_size);
  return sample;
}

BatchResult run_batch(const RunConfig& config, const FitTarget& target,
                      std::size_t run_index) {
  const std::size_t batch = config.batch_size;
  const std::size_t days = target.observed.days();
  BatchResult result;
  result.run_index = run_index;
  result.params.resize(batch);
  result.distances.resize(batch);
  result.accepted.resize(batch);

  ObservedArray simulated(days);
  for (std::size_t b = 0; b < batch; ++b) {
    const std::uint64_t id = sample_id(run_index, b, batch);
    const ModelParams params = sample_prior_one(config.prior, config.seed, id);
    RandomStream rng(config.seed, StreamDomain::kSimulation, id);
    simulate_observed(params,
                      init_state(target.day0, params.kappa, target.population),
                      target.population, rng, config.spread, simulated);
    const double distance = euclidean_distance(simulated, target.observed);
    result.params[b] = params;
    result.distances[b] = distance;
    result.accepted[b] = distance <= config.tolerance ? 1 : 0;
  }
  return result;
}

BatchResult run_batch(const RunConfig& config, const ObservedSeries& obs,
                      std::size_t run_index) {
  return run_batch(config, FitTarget::from_series(obs, config.fit_days),
                   run_index);
}

std::vector<ChunkRange> chunk_filter(const BatchResult& batch,
                                     std::size_t chunk_size) {
  const std::size_t n = batch.size();
  const std::size_t width = chunk_size == 0 ? n : chunk_size;
  std::vector<ChunkRange> chunks;
  for (std::size_t begin = 0; begin < n; begin += width) {
    const std::size_t end = std::min(n, begin + width);
    const bool any = std::any_of(batch.accepted.begin() + begin,
                                 batch.accepted.begin() + end,
                                 [](std::uint8_t a) { return a != 0; });
    if (any) chunks.push_back({begin, end});
  }
  return chunks;
}

TopKResult top_k_filter(const BatchResult& batch, std::size_t k) {
  TopKResult result;
  result.accepted_count = batch.accepted_count();
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  k = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (batch.distances[a] != batch.distances[b]) {
                        return batch.distances[a] < batch.distances[b];
                      }
                      return a < b;
                    });
  order.resize(k);
  result.indices = std::move(order);
  return result;
}

Shipment ship_batch(const BatchResult& batch, const RunConfig& config) {
  Shipment shipment;
  shipment.run_index = batch.run_index;
  shipment.batch_size = batch.size();
  shipment.accepted_count = batch.accepted_count();
  if (shipment.accepted_count == 0) return shipment;

  switch (config.filter_mode) {
    case FilterMode::kChunked:
      for (const ChunkRange& chunk : chunk_filter(batch, config.chunk_size)) {
        for (std::size_t i = chunk.begin; i < chunk.end; ++i) {
          shipment.candidates.push_back(make_sample(batch, i));
        }
      }
      break;
    case FilterMode::kTopK:
      for (std::size_t i : top_k_filter(batch, config.effective_top_k()).indices) {
        shipment.candidates.push_back(make_sample(batch, i));
      }
      break;
  }
  return shipment;
}

std::vector<PosteriorSample> host_filter(const Shipment& shipment,
                                         double tolerance) {
  std::vector<PosteriorSample> kept;
  for (const PosteriorSample& s : shipment.candidates) {
    if (s.distance <= tolerance) kept.push_back(s);
  }
  std::sort(kept.begin(), kept.end(),
            [](const PosteriorSample& a, const PosteriorSample& b) {
              return a.in_batch_index < b.in_batch_index;
            });
  return kept;
}

std::vector<PosteriorSample> accepted_samples(const BatchResult& batch) {
  std::vector<PosteriorSample> out;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch.accepted[i]) out.push_back(make_sample(batch, i));
  }
  return out;
}

void finalize_stats(RunStats& stats, std::span<const double> run_seconds) {
  stats.acceptance_rate =
      stats.samples_simulated == 0
          ? 0.0
          : static_cast<double>(stats.samples_accepted) /
                static_cast<double>(stats.samples_simulated);
  if (run_seconds.empty()) return;
  const double n = static_cast<double>(run_seconds.size());
  const double mean =
      std::accumulate(run_seconds.begin(), run_seconds.end(), 0.0) / n;
  double var = 0.0;
  for (double t : run_seconds) var += (t - mean) * (t - mean);
  stats.wall_time_per_run_mean_s = mean;
  stats.wall_time_per_run_std_s =
      run_seconds.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
}

InferenceResult infer(const RunConfig& config, const ObservedSeries& obs) {
  config.validate();
  const FitTarget target = FitTarget::from_series(obs, config.fit_days);
  const auto start = Clock::now();

  InferenceResult result;
  result.stats.num_workers = 1;
  std::vector<double> run_seconds;
  for (std::size_t run = 0; run < config.max_runs; ++run) {
    const auto run_start = Clock::now();
    const BatchResult batch = run_batch(config, target, run);
    Shipment shipment = ship_batch(batch, config);
    run_seconds.push_back(seconds_since(run_start));

    const auto post_start = Clock::now();
    std::vector<PosteriorSample> kept = host_filter(shipment, config.tolerance);
    result.stats.host_postprocess_s += seconds_since(post_start);

    result.stats.runs_executed += 1;
    result.stats.samples_simulated += batch.size();
    result.stats.samples_accepted += shipment.accepted_count;
    result.stats.samples_transferred += shipment.candidates.size();
    result.stats.truncation_loss += shipment.accepted_count - kept.size();
    result.samples.insert(result.samples.end(), kept.begin(), kept.end());
    if (result.samples.size() >= config.target_accepted) break;
  }
  if (result.samples.size() < config.target_accepted) {
    result.status = InferenceStatus::kMaxRunsExceeded;
  }
  result.stats.samples_returned = result.samples.size();
  result.stats.wall_time_total_s = seconds_since(start);
  finalize_stats(result.stats, run_seconds);
  return result;
}

InferenceResult infer_sequential_oracle(const RunConfig& config,
                                        const ObservedSeries& obs) {
  config.validate();
  const FitTarget target = FitTarget::from_series(obs, config.fit_days);
  const auto start = Clock::now();

  InferenceResult result;
  const std::uint64_t total =
      static_cast<std::uint64_t>(config.max_runs) * config.batch_size;
  for (std::uint64_t id = 0; id < total; ++id) {
    const PosteriorSample sample = evaluate_sample(config, target, id);
    result.stats.samples_simulated += 1;
    if (sample.distance <= config.tolerance) result.samples.push_back(sample);
    const bool run_boundary = (id + 1) % config.batch_size == 0;
    if (run_boundary) {
      result.stats.runs_executed += 1;
      if (result.samples.size() >= config.target_accepted) break;
    }
  }
  if (result.samples.size() < config.target_accepted) {
    result.status = InferenceStatus::kMaxRunsExceeded;
  }
  result.stats.samples_accepted = result.samples.size();
  result.stats.samples_returned = result.samples.size();
  result.stats.samples_transferred = result.samples.size();
  result.stats.wall_time_total_s = seconds_since(start);
  finalize_stats(result.stats, {});
  return result;
}

}  // namespace parabc
