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

// Command-line front end: ingest, infer, project, histogram, benchmark.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "parabc/abc.hpp"
#include "parabc/config.hpp"
#include "parabc/errors.hpp"
#include "parabc/ingest.hpp"
#include "parabc/io_util.hpp"
#include "parabc/report.hpp"
#include "parabc/runtime.hpp"

namespace {

using namespace parabc;

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct Overrides {
  std::optional<double> tolerance;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> country;
  std::optional<std::size_t> days;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--tolerance", o.tolerance, "ABC tolerance");
  cmd->add_option("--batch-size", o.batch_size, "samples per run");
  cmd->add_option("--workers", o.workers, "worker threads");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--country", o.country, "country (selects the cached series)");
  cmd->add_option("--days", o.days, "days to fit (infer) or project (project)");
}

void apply_overrides(AppConfig& cfg, const Overrides& o, bool days_are_fit) {
  if (o.tolerance) cfg.run.tolerance = *o.tolerance;
  if (o.batch_size) cfg.run.batch_size = *o.batch_size;
  if (o.workers) cfg.run.num_workers = *o.workers;
  if (o.seed) cfg.run.seed = *o.seed;
  if (o.country) cfg.country = *o.country;
  if (o.days) {
    if (days_are_fit) {
      cfg.run.fit_days = *o.days;
    } else {
      cfg.projection_days = *o.days;
    }
  }
}

std::vector<std::size_t> parse_worker_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const double v = parse_number(item, "worker count");
    if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw ConfigError("worker counts must be positive integers, got '" +
                        item + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("empty worker list");
  return out;
}

int cmd_ingest(const std::string& confirmed, const std::string& recovered,
               const std::string& deaths, const std::string& country,
               const std::string& population_table, const std::string& out,
               double threshold) {
  const RawSeries raw = parse_jhu_csv(confirmed, recovered, deaths, country);
  const double population = load_population(population_table, country);
  const ObservedSeries series =
      derive_observed(raw, country, population, threshold);
  write_series(series, out);
  std::cout << "wrote " << series.days() << " days for " << country
            << " starting " << format_date(series.start_date) << " to " << out
            << ".{csv,json}\n";
  return 0;
}

int cmd_infer(AppConfig cfg) {
  const ObservedSeries series = read_series(cfg.series_base());
  const InferenceResult result = run_parallel(cfg.run, series);
  write_file_atomic(cfg.output_dir / "posterior.csv",
                    posterior_csv(result.samples));
  write_file_atomic(
      cfg.output_dir / "stats.json",
      stats_json(result.stats, cfg.run, result.samples, result.status));
  std::cout << "accepted " << result.samples.size() << " samples in "
            << result.stats.runs_executed << " runs ("
            << result.stats.samples_simulated << " simulated, "
            << result.stats.wall_time_total_s << " s)\n";
  if (result.status == InferenceStatus::kMaxRunsExceeded) {
    std::cerr << "error: max_runs (" << cfg.run.max_runs
              << ") reached before target_accepted ("
              << cfg.run.target_accepted << "); partial results written\n";
    return kExitRuntime;
  }
  return 0;
}

int cmd_project(const std::string& posterior_path, const std::string& series,
                const std::string& out, const ProjectionOptions& options) {
  const auto posterior = read_posterior_csv(posterior_path);
  const ObservedSeries observed = read_series(series);
  const ProjectionBands bands = project(posterior, observed, options);
  write_file_atomic(out, bands.to_csv());
  std::cout << "wrote " << bands.days << "-day bands from " << posterior.size()
            << " samples to " << out << '\n';
  return 0;
}

int cmd_histogram(const std::string& posterior_path, const PriorSpec& prior,
                  std::size_t bins, const std::string& out) {
  const auto posterior = read_posterior_csv(posterior_path);
  write_file_atomic(out, histogram(posterior, prior, bins).to_json());
  std::cout << "wrote histograms of " << posterior.size() << " samples to "
            << out << '\n';
  return 0;
}

int cmd_benchmark(AppConfig cfg, const std::vector<std::size_t>& workers,
                  const BenchmarkOptions& options) {
  const ObservedSeries series = read_series(cfg.series_base());
  const ScalingReport report =
      benchmark_scaling(cfg.run, series, workers, options);
  for (const std::string& w : report.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  write_file_atomic(cfg.output_dir / "scaling.csv", report.to_csv());
  write_file_atomic(cfg.output_dir / "scaling.json", report.to_json());
  std::cout << report.to_csv();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batched multi-worker ABC inference for a stochastic "
               "six-compartment COVID-19 model"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "derive a country series from JHU CSVs");
  std::string confirmed, recovered, deaths, country, population_table, out_base;
  double threshold = 100;
  ingest->add_option("--confirmed", confirmed, "JHU confirmed CSV")->required();
  ingest->add_option("--recovered", recovered, "JHU recovered CSV")->required();
  ingest->add_option("--deaths", deaths, "JHU deaths CSV")->required();
  ingest->add_option("--country", country, "Country/Region name")->required();
  ingest->add_option("--population-table", population_table,
                     "CSV of country,population")->required();
  ingest->add_option("--out", out_base, "output base path (writes .csv and .json)")
      ->required();
  ingest->add_option("--threshold", threshold, "onset threshold of confirmed cases");

  // infer
  auto* infer = app.add_subcommand("infer", "run ABC until the target is accepted");
  std::string infer_config;
  Overrides infer_overrides;
  infer->add_option("config", infer_config, "run-config JSON")->required();
  add_overrides(infer, infer_overrides);

  // project
  auto* proj = app.add_subcommand("project", "simulate posterior projections");
  std::string posterior_path, series_base, bands_out, project_config;
  ProjectionOptions project_options;
  std::optional<std::size_t> project_days;
  std::optional<std::size_t> project_workers;
  std::optional<std::uint64_t> project_seed;
  proj->add_option("--posterior", posterior_path, "posterior CSV")->required();
  proj->add_option("--series", series_base, "cached series base path")->required();
  proj->add_option("--out", bands_out, "bands CSV")->required();
  proj->add_option("--config", project_config,
                   "run-config JSON supplying seed, workers, spread, days");
  proj->add_option("--days", project_days, "projection length");
  proj->add_option("--workers", project_workers, "worker threads");
  proj->add_option("--seed", project_seed, "random seed");
  proj->add_option("--low", project_options.low_percentile, "lower percentile");
  proj->add_option("--high", project_options.high_percentile, "upper percentile");

  // histogram
  auto* hist = app.add_subcommand("histogram", "histogram posterior parameters");
  std::string hist_posterior, hist_out, hist_config;
  std::optional<std::size_t> bins;
  hist->add_option("--posterior", hist_posterior, "posterior CSV")->required();
  hist->add_option("--out", hist_out, "histogram JSON")->required();
  hist->add_option("--bins", bins, "bins per parameter (default 20)");
  hist->add_option("--config", hist_config, "run-config JSON supplying the prior");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "worker-count scaling report");
  std::string bench_config;
  std::string worker_list = "1,2,4";
  Overrides bench_overrides;
  BenchmarkOptions bench_options;
  bench->add_option("config", bench_config, "run-config JSON")->required();
  bench->add_option("--workers-list", worker_list, "comma-separated worker counts");
  bench->add_option("--runs", bench_options.runs, "fixed runs per measurement");
  bench->add_option("--repetitions", bench_options.repetitions,
                    "repetitions per worker count");
  bench->add_option("--tolerance", bench_overrides.tolerance, "ABC tolerance");
  bench->add_option("--batch-size", bench_overrides.batch_size, "samples per run");
  bench->add_option("--seed", bench_overrides.seed, "random seed");
  bench->add_option("--country", bench_overrides.country, "country");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*ingest) {
      return cmd_ingest(confirmed, recovered, deaths, country, population_table,
                        out_base, threshold);
    }
    if (*infer) {
      AppConfig cfg = load_config(infer_config);
      apply_overrides(cfg, infer_overrides, true);
      cfg.run.validate();
      return cmd_infer(std::move(cfg));
    }
    if (*proj) {
      if (!project_config.empty()) {
        const AppConfig cfg = load_config(project_config);
        project_options.seed = cfg.run.seed;
        project_options.workers = cfg.run.num_workers;
        project_options.spread = cfg.run.spread;
        project_options.days = cfg.projection_days;
      }
      if (project_days) project_options.days = *project_days;
      if (project_workers) project_options.workers = *project_workers;
      if (project_seed) project_options.seed = *project_seed;
      return cmd_project(posterior_path, series_base, bands_out, project_options);
    }
    if (*hist) {
      PriorSpec prior;
      std::size_t n_bins = 20;
      if (!hist_config.empty()) {
        const AppConfig cfg = load_config(hist_config);
        prior = cfg.run.prior;
        n_bins = cfg.histogram_bins;
      }
      if (bins) n_bins = *bins;
      return cmd_histogram(hist_posterior, prior, n_bins, hist_out);
    }
    if (*bench) {
      AppConfig cfg = load_config(bench_config);
      apply_overrides(cfg, bench_overrides, true);
      cfg.run.validate();
      return cmd_benchmark(std::move(cfg), parse_worker_list(worker_list),
                           bench_options);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidPrior& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
