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

#include "parabc/runtime.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "parabc/errors.hpp"
#include "parabc/io_util.hpp"

namespace parabc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CollectedRun {
  std::vector<PosteriorSample> kept;
  std::size_t accepted_count = 0;
  std::size_t shipped = 0;
  std::size_t batch_size = 0;
  double run_seconds = 0.0;
};

// Shared driver: workers claim run indices from an atomic counter and ship
// filtered batches to the collector on the calling thread. With no fixed
// run count, the stop point is the first run whose in-order cumulative
// count reaches the target; later runs that finished speculatively are
// dropped so the output never depends on scheduling.
InferenceResult execute(const RunConfig& config, const ObservedSeries& obs,
                        std::optional<std::size_t> fixed_runs) {
  config.validate();
  const FitTarget target = FitTarget::from_series(obs, config.fit_days);
  const std::size_t run_limit = fixed_runs.value_or(config.max_runs);
  const std::size_t workers = config.num_workers;
  const auto start = Clock::now();

  std::atomic<std::size_t> next_run{0};
  std::atomic<bool> stop{false};
  Channel<Shipment> channel(workers);
  std::mutex error_mutex;
  std::exception_ptr error;

  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        while (!stop.load(std::memory_order_relaxed)) {
          const std::size_t run = next_run.fetch_add(1);
          if (run >= run_limit) break;
          const auto run_start = Clock::now();
          Shipment shipment = ship_batch(run_batch(config, target, run), config);
          shipment.run_seconds = seconds_since(run_start);
          channel.push(std::move(shipment));
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        stop = true;
      }
      channel.close();
    });
  }

  InferenceResult result;
  std::map<std::size_t, CollectedRun> runs;
  std::size_t next_in_order = 0;
  std::size_t cumulative = 0;
  std::optional<std::size_t> stop_run;
  while (auto shipment = channel.pop()) {
    const auto post_start = Clock::now();
    CollectedRun collected;
    collected.kept = host_filter(*shipment, config.tolerance);
    collected.accepted_count = shipment->accepted_count;
    collected.shipped = shipment->candidates.size();
    collected.batch_size = shipment->batch_size;
    collected.run_seconds = shipment->run_seconds;
    result.stats.host_postprocess_s += seconds_since(post_start);
    runs.emplace(shipment->run_index, std::move(collected));

    if (fixed_runs || stop_run) continue;
    for (auto it = runs.find(next_in_order); it != runs.end();
         it = runs.find(next_in_order)) {
      cumulative += it->second.kept.size();
      if (cumulative >= config.target_accepted) {
        stop_run = next_in_order;
        stop = true;
        break;
      }
      ++next_in_order;
    }
  }
  pool.clear();
  if (error) std::rethrow_exception(error);

  std::vector<double> run_seconds;
  for (auto& [index, run] : runs) {
    if (stop_run && index > *stop_run) break;
    result.samples.insert(result.samples.end(), run.kept.begin(),
                          run.kept.end());
    result.stats.runs_executed += 1;
    result.stats.samples_simulated += run.batch_size;
    result.stats.samples_accepted += run.accepted_count;
    result.stats.samples_transferred += run.shipped;
    result.stats.truncation_loss += run.accepted_count - run.kept.size();
    run_seconds.push_back(run.run_seconds);
  }
  if (!fixed_runs && result.samples.size() < config.target_accepted) {
    result.status = InferenceStatus::kMaxRunsExceeded;
  }
  result.stats.samples_returned = result.samples.size();
  result.stats.num_workers = workers;
  result.stats.wall_time_total_s = seconds_since(start);
  finalize_stats(result.stats, run_seconds);
  return result;
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, values.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0};
}

}  // namespace

InferenceResult run_parallel(const RunConfig& config,
                             const ObservedSeries& obs) {
  return execute(config, obs, std::nullopt);
}

InferenceResult run_fixed(const RunConfig& config, const ObservedSeries& obs,
                          std::size_t runs) {
  if (runs < 1) throw ConfigError("benchmark run count must be at least 1");
  return execute(config, obs, runs);
}

ScalingReport benchmark_scaling(const RunConfig& config,
                                const ObservedSeries& obs,
                                const std::vector<std::size_t>& worker_counts,
                                const BenchmarkOptions& options) {
  if (worker_counts.empty()) {
    throw ConfigError("benchmark needs at least one worker count");
  }
  if (options.repetitions < 1) {
    throw ConfigError("benchmark repetitions must be at least 1");
  }
  ScalingReport report;
  report.runs = options.runs;
  report.repetitions = options.repetitions;
  report.batch_size = config.batch_size;
  report.chunk_size = config.chunk_size;
  report.hardware_threads = std::thread::hardware_concurrency();

  for (std::size_t workers : worker_counts) {
    if (report.hardware_threads != 0 && workers > report.hardware_threads) {
      report.warnings.push_back(
          std::to_string(workers) + " workers exceed the " +
          std::to_string(report.hardware_threads) + " available hardware threads");
    }
    RunConfig cfg = config;
    cfg.num_workers = workers;
    std::vector<double> totals;
    std::vector<double> per_run;
    for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
      const InferenceResult r = run_fixed(cfg, obs, options.runs);
      totals.push_back(r.stats.wall_time_total_s);
      per_run.push_back(r.stats.wall_time_per_run_mean_s);
    }
    ScalingRow row;
    row.workers = workers;
    std::tie(row.total_s, row.total_std_s) = mean_std(totals);
    std::tie(row.time_per_run_ms, row.time_per_run_std_ms) = mean_std(per_run);
    row.time_per_run_ms *= 1e3;
    row.time_per_run_std_ms *= 1e3;
    report.rows.push_back(row);
  }

  const ScalingRow& base = report.rows.front();
  for (ScalingRow& row : report.rows) {
    row.speedup = base.total_s / row.total_s;
    const double ideal = static_cast<double>(row.workers) /
                         static_cast<double>(base.workers);
    row.overhead = 1.0 - row.speedup / ideal;
  }
  report.rows.front().speedup = 1.0;
  report.rows.front().overhead = 0.0;
  return report;
}

std::string ScalingReport::to_csv() const {
  std::ostringstream out;
  out << "workers,time_per_run_ms,total_s,speedup,overhead\n";
  for (const ScalingRow& row : rows) {
    out << row.workers << ',' << format_number(row.time_per_run_ms) << ','
        << format_number(row.total_s) << ',' << format_number(row.speedup)
        << ',' << format_number(row.overhead) << '\n';
  }
  return out.str();
}

std::string ScalingReport::to_json() const {
  nlohmann::ordered_json j;
  j["runs"] = runs;
  j["repetitions"] = repetitions;
  j["batch_size"] = batch_size;
  j["chunk_size"] = chunk_size;
  j["hardware_threads"] = hardware_threads;
  j["rows"] = nlohmann::ordered_json::array();
  for (const ScalingRow& row : rows) {
    j["rows"].push_back({{"workers", row.workers},
                         {"time_per_run_ms", row.time_per_run_ms},
                         {"time_per_run_std_ms", row.time_per_run_std_ms},
                         {"total_s", row.total_s},
                         {"total_std_s", row.total_std_s},
                         {"speedup", row.speedup},
                         {"overhead", row.overhead}});
  }
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

}  // namespace parabc
