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

#include <numeric>

#include "doctest.h"
#include "json.hpp"
#include "parabc/errors.hpp"
#include "parabc/report.hpp"
#include "test_support.hpp"

using namespace parabc;

namespace {

std::vector<PosteriorSample> samples_from(const std::vector<ModelParams>& ps) {
  std::vector<PosteriorSample> out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    out.push_back({ps[i], 1.5 * static_cast<double>(i), i / 3, i % 3});
  }
  return out;
}

}  // namespace

TEST_CASE("posterior csv round-trips") {
  const auto samples = samples_from(sample_prior(PriorSpec{}, 25, 3));
  const std::string csv = posterior_csv(samples);
  CHECK(csv.rfind(std::string(kPosteriorHeader) + "\n", 0) == 0);
  CHECK(parse_posterior_csv(csv) == samples);
  CHECK_THROWS_AS(parse_posterior_csv("run,index\n"), MalformedCsv);
}

TEST_CASE("stats json carries every field and the posterior means") {
  const auto samples = samples_from(
      {ModelParams{1, 2, 3, 4, 5, 6, 7, 8}, ModelParams{3, 4, 5, 6, 7, 8, 9, 10}});
  RunStats stats;
  stats.samples_simulated = 10;
  stats.samples_accepted = 2;
  const auto j = nlohmann::json::parse(
      stats_json(stats, RunConfig{}, samples, InferenceStatus::kCompleted));
  for (const char* key :
       {"runs_executed", "samples_simulated", "samples_accepted",
        "acceptance_rate", "wall_time_total_s", "wall_time_per_run_mean_s",
        "wall_time_per_run_std_s", "host_postprocess_s", "samples_transferred",
        "truncation_loss"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["posterior_means"]["alpha0"] == 2.0);
  CHECK(j["posterior_means"]["kappa"] == 9.0);
  CHECK(j["status"] == "completed");
}

TEST_CASE("nearest-rank percentiles") {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i + 1;
  CHECK(nearest_rank(v, 5) == 5);
  CHECK(nearest_rank(v, 50) == 50);
  CHECK(nearest_rank(v, 95) == 95);
  CHECK(nearest_rank(v, 0) == 1);
  CHECK(nearest_rank(v, 100) == 100);
  CHECK(nearest_rank({7.0}, 5) == 7.0);
  CHECK(nearest_rank({1, 2, 3}, 50) == 2);
  CHECK_THROWS_AS(nearest_rank({}, 50), EmptyPosterior);
}

TEST_CASE("projection bands") {
  const ObservedSeries series = testing::italy_like_series(10);

  SUBCASE("single sample collapses the band") {
    const auto posterior = samples_from({testing::italy_reference_params()});
    const ProjectionBands b = project(posterior, series, {.days = 30});
    REQUIRE(b.bands.size() == 30);
    for (std::size_t d = 0; d < 30; ++d) {
      for (std::size_t o = 0; o < 3; ++o) {
        CHECK(b.bands[d][o].low == b.trajectories[0].at(o, d));
        CHECK(b.bands[d][o].median == b.trajectories[0].at(o, d));
        CHECK(b.bands[d][o].high == b.trajectories[0].at(o, d));
      }
    }
  }
  SUBCASE("zero rates give flat bands at the initial state") {
    const auto posterior = samples_from({ModelParams{}, ModelParams{}});
    const ProjectionBands b = project(posterior, series, {.days = 20});
    for (const auto& day : b.bands) {
      CHECK(day[0].low == series.A[0]);
      CHECK(day[0].high == series.A[0]);
      CHECK(day[1].median == series.R[0]);
      CHECK(day[2].median == series.D[0]);
    }
  }
  SUBCASE("ordered, deterministic and independent of workers") {
    const auto posterior = samples_from(sample_prior(PriorSpec{}, 40, 1));
    const ProjectionBands a = project(posterior, series, {.days = 60, .seed = 4});
    const ProjectionBands b =
        project(posterior, series, {.days = 60, .seed = 4, .workers = 3});
    CHECK(a.to_csv() == b.to_csv());
    for (const auto& day : a.bands) {
      for (const Band& band : day) {
        CHECK(band.low <= band.median);
        CHECK(band.median <= band.high);
      }
    }
    const std::string csv = a.to_csv();
    CHECK(csv.rfind("day,observable,p05,p50,p95\n0,A,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 60 * 3);
  }
  SUBCASE("empty posterior") {
    CHECK_THROWS_AS(project({}, series), EmptyPosterior);
  }
  SUBCASE("coverage of the generating parameters") {
    const auto posterior = samples_from(
        std::vector<ModelParams>(5, testing::italy_reference_params()));
    const ProjectionBands b = project(posterior, series, {.days = 10});
    CHECK(band_coverage(b, series, 1) == 1.0);
  }
}

TEST_CASE("histograms") {
  const PriorSpec prior;
  SUBCASE("identical samples fill one bin") {
    const auto posterior = samples_from(
        std::vector<ModelParams>(100, testing::italy_reference_params()));
    const HistogramExport h = histogram(posterior, prior, 20);
    REQUIRE(h.parameters.size() == 8);
    for (const auto& p : h.parameters) {
      CHECK(std::count_if(p.counts.begin(), p.counts.end(),
                          [](std::size_t c) { return c > 0; }) == 1);
      CHECK(p.edges.size() == 21);
    }
    CHECK(h.parameters[1].edges.back() == 100.0);
  }
  SUBCASE("counts sum to the sample count") {
    const auto posterior = samples_from(sample_prior(prior, 333, 8));
    for (std::size_t bins : {1, 7, 20}) {
      const HistogramExport h = histogram(posterior, prior, bins);
      CHECK(h.sample_count == 333);
      for (const auto& p : h.parameters) {
        CHECK(std::accumulate(p.counts.begin(), p.counts.end(), std::size_t{0}) ==
              333);
        CHECK(p.counts.size() == bins);
      }
    }
    CHECK(histogram(posterior, prior, 1).parameters[0].counts ==
          std::vector<std::size_t>{333});
  }
  SUBCASE("json export") {
    const auto posterior = samples_from(sample_prior(prior, 10, 8));
    const auto j = nlohmann::json::parse(histogram(posterior, prior, 4).to_json());
    CHECK(j["sample_count"] == 10);
    CHECK(j["parameters"][2]["name"] == "n");
  }
  CHECK_THROWS_AS(histogram({}, prior), EmptyPosterior);
}
