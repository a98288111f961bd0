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

#include "parabc/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "parabc/config.hpp"
#include "parabc/errors.hpp"
#include "parabc/io_util.hpp"

namespace parabc {
namespace {

constexpr std::array<const char*, 3> kObservables = {"A", "R", "D"};

std::string percentile_label(double p) {
  std::ostringstream s;
  s << 'p';
  if (p < 10.0) s << '0';
  s << format_number(p);
  return s.str();
}

}  // namespace

std::string posterior_csv(const std::vector<PosteriorSample>& samples) {
  std::ostringstream out;
  out << kPosteriorHeader << '\n';
  for (const PosteriorSample& s : samples) {
    out << s.run_index << ',' << s.in_batch_index << ','
        << format_number(s.distance);
    for (double v : s.params.to_array()) out << ',' << format_number(v);
    out << '\n';
  }
  return out.str();
}

std::vector<PosteriorSample> parse_posterior_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kPosteriorHeader) {
    throw MalformedCsv("posterior header must be '" +
                       std::string(kPosteriorHeader) + "'");
  }
  std::vector<PosteriorSample> samples;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_record(line);
    if (fields.size() != 3 + ModelParams::kSize) {
      throw MalformedCsv("posterior row has " + std::to_string(fields.size()) +
                         " fields");
    }
    PosteriorSample s;
    s.run_index = static_cast<std::size_t>(parse_number(fields[0], "run"));
    s.in_batch_index = static_cast<std::size_t>(parse_number(fields[1], "index"));
    s.distance = parse_number(fields[2], "distance");
    std::array<double, ModelParams::kSize> values;
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = parse_number(fields[3 + i], ModelParams::kNames[i]);
    }
    s.params = ModelParams::from_array(values);
    samples.push_back(s);
  }
  return samples;
}

std::vector<PosteriorSample> read_posterior_csv(
    const std::filesystem::path& path) {
  return parse_posterior_csv(read_file(path));
}

std::array<double, ModelParams::kSize> posterior_means(
    const std::vector<PosteriorSample>& samples) {
  std::array<double, ModelParams::kSize> means{};
  if (samples.empty()) return means;
  for (const PosteriorSample& s : samples) {
    const auto values = s.params.to_array();
    for (std::size_t i = 0; i < means.size(); ++i) means[i] += values[i];
  }
  for (double& m : means) m /= static_cast<double>(samples.size());
  return means;
}

std::string stats_json(const RunStats& stats, const RunConfig& config,
                       const std::vector<PosteriorSample>& samples,
                       InferenceStatus status) {
  nlohmann::ordered_json j;
  j["status"] = status == InferenceStatus::kCompleted ? "completed"
                                                      : "max_runs_exceeded";
  j["runs_executed"] = stats.runs_executed;
  j["samples_simulated"] = stats.samples_simulated;
  j["samples_accepted"] = stats.samples_accepted;
  j["samples_returned"] = stats.samples_returned;
  j["acceptance_rate"] = stats.acceptance_rate;
  j["wall_time_total_s"] = stats.wall_time_total_s;
  j["wall_time_per_run_mean_s"] = stats.wall_time_per_run_mean_s;
  j["wall_time_per_run_std_s"] = stats.wall_time_per_run_std_s;
  j["host_postprocess_s"] = stats.host_postprocess_s;
  j["samples_transferred"] = stats.samples_transferred;
  j["truncation_loss"] = stats.truncation_loss;
  j["num_workers"] = stats.num_workers;

  auto& cfg = j["config"];
  cfg["tolerance"] = config.tolerance;
  cfg["batch_size"] = config.batch_size;
  cfg["target_accepted"] = config.target_accepted;
  cfg["chunk_size"] = config.chunk_size;
  cfg["filter_mode"] = to_string(config.filter_mode);
  cfg["top_k"] = config.effective_top_k();
  cfg["fit_days"] = config.fit_days;
  cfg["seed"] = config.seed;
  cfg["gaussian_spread"] = to_string(config.spread);

  const auto means = posterior_means(samples);
  auto& m = j["posterior_means"];
  m = nlohmann::ordered_json::object();
  if (!samples.empty()) {
    for (std::size_t i = 0; i < means.size(); ++i) {
      m[std::string(ModelParams::kNames[i])] = means[i];
    }
  }
  return j.dump(2) + "\n";
}

double nearest_rank(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw EmptyPosterior("percentile of an empty sample");
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

ProjectionBands project(const std::vector<PosteriorSample>& posterior,
                        const ObservedSeries& series,
                        const ProjectionOptions& options) {
  if (posterior.empty()) throw EmptyPosterior("posterior has no samples");
  if (options.days < 1) throw ConfigError("projection needs at least one day");
  if (!(options.low_percentile <= 50.0 && 50.0 <= options.high_percentile)) {
    throw ConfigError("percentiles must satisfy low <= 50 <= high");
  }

  ProjectionBands out;
  out.days = options.days;
  out.low_percentile = options.low_percentile;
  out.high_percentile = options.high_percentile;
  out.trajectories.assign(posterior.size(), ObservedArray(options.days));

  const DayZero day0 = series.day0();
  auto simulate_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const ModelParams& params = posterior[i].params;
      RandomStream rng(options.seed, StreamDomain::kProjection, i);
      simulate_observed(params,
                        init_state(day0, params.kappa, series.population),
                        series.population, rng, options.spread,
                        out.trajectories[i]);
    }
  };
  const std::size_t workers =
      std::clamp<std::size_t>(options.workers, 1, posterior.size());
  if (workers == 1) {
    simulate_range(0, posterior.size());
  } else {
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t per = (posterior.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(posterior.size(), w * per);
      const std::size_t end = std::min(posterior.size(), begin + per);
      pool.emplace_back([&, w, begin, end] {
        try {
          simulate_range(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  out.bands.resize(options.days);
  std::vector<double> column(posterior.size());
  for (std::size_t day = 0; day < options.days; ++day) {
    for (std::size_t obs = 0; obs < kObservables.size(); ++obs) {
      for (std::size_t i = 0; i < posterior.size(); ++i) {
        column[i] = out.trajectories[i].at(obs, day);
      }
      std::sort(column.begin(), column.end());
      out.bands[day][obs] = {nearest_rank(column, options.low_percentile),
                             nearest_rank(column, 50.0),
                             nearest_rank(column, options.high_percentile)};
    }
  }
  return out;
}

std::string ProjectionBands::to_csv() const {
  std::ostringstream out;
  out << "day,observable," << percentile_label(low_percentile) << ",p50,"
      << percentile_label(high_percentile) << '\n';
  for (std::size_t day = 0; day < bands.size(); ++day) {
    for (std::size_t obs = 0; obs < kObservables.size(); ++obs) {
      const Band& b = bands[day][obs];
      out << day << ',' << kObservables[obs] << ',' << format_number(b.low)
          << ',' << format_number(b.median) << ',' << format_number(b.high)
          << '\n';
    }
  }
  return out.str();
}

double band_coverage(const ProjectionBands& bands, const ObservedSeries& series,
                     std::size_t days) {
  days = std::min({days, bands.days, series.days()});
  if (days == 0) return 0.0;
  std::size_t covered = 0;
  for (std::size_t d = 0; d < days; ++d) {
    const std::array<double, 3> truth = {series.A[d], series.R[d], series.D[d]};
    bool inside = true;
    for (std::size_t obs = 0; obs < 3; ++obs) {
      const Band& b = bands.bands[d][obs];
      inside = inside && b.low <= truth[obs] && truth[obs] <= b.high;
    }
    if (inside) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(days);
}

HistogramExport histogram(const std::vector<PosteriorSample>& posterior,
                          const PriorSpec& prior, std::size_t bins) {
  if (posterior.empty()) throw EmptyPosterior("posterior has no samples");
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  prior.validate();

  HistogramExport out;
  out.sample_count = posterior.size();
  for (std::size_t p = 0; p < ModelParams::kSize; ++p) {
    ParameterHistogram h;
    h.name = std::string(ModelParams::kNames[p]);
    const double lo = prior.lower[p];
    const double hi = prior.upper[p];
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t e = 0; e <= bins; ++e) {
      h.edges.push_back(e == bins ? hi : lo + width * static_cast<double>(e));
    }
    h.counts.assign(bins, 0);
    for (const PosteriorSample& s : posterior) {
      const double v = s.params.to_array()[p];
      // Values outside the support are clamped into the end bins.
      const double pos = std::floor((v - lo) / width);
      const auto bin = static_cast<std::size_t>(
          std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
      ++h.counts[bin];
    }
    out.parameters.push_back(std::move(h));
  }
  return out;
}

std::string HistogramExport::to_json() const {
  nlohmann::ordered_json j;
  j["sample_count"] = sample_count;
  j["parameters"] = nlohmann::ordered_json::array();
  for (const ParameterHistogram& h : parameters) {
    j["parameters"].push_back(
        {{"name", h.name}, {"edges", h.edges}, {"counts", h.counts}});
  }
  return j.dump(2) + "\n";
}

}  // namespace parabc
