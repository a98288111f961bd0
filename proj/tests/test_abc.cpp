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

#include <cmath>
#include <set>

#include "doctest.h"
#include "parabc/abc.hpp"
#include "parabc/errors.hpp"
#include "test_support.hpp"

using namespace parabc;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.batch_size = 200;
  cfg.chunk_size = 50;
  cfg.fit_days = 14;
  cfg.target_accepted = 10;
  cfg.max_runs = 50;
  cfg.seed = 5;
  return cfg;
}

ObservedSeries small_series() {
  return testing::synthetic_series(testing::italy_reference_params(),
                                   {150, 2, 3}, 1e6, 14, 8);
}

BatchResult synthetic_batch(const std::vector<double>& distances,
                            double tolerance) {
  BatchResult b;
  b.run_index = 3;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    ModelParams p;
    p.alpha0 = static_cast<double>(i);
    b.params.push_back(p);
    b.distances.push_back(distances[i]);
    b.accepted.push_back(distances[i] <= tolerance ? 1 : 0);
  }
  return b;
}

BatchResult sparse_batch(std::size_t size, const std::set<std::size_t>& hits) {
  std::vector<double> d(size, 10.0);
  for (std::size_t i : hits) d[i] = 1.0;
  return synthetic_batch(d, 5.0);
}

}  // namespace

TEST_CASE("euclidean_distance") {
  ObservedArray a(49), b(49);
  CHECK(euclidean_distance(a, a) == 0.0);
  for (double& v : b.values()) v = 1.0;
  CHECK(euclidean_distance(a, b) == doctest::Approx(std::sqrt(147.0)));
  CHECK(euclidean_distance(a, b) == doctest::Approx(12.124355653));
  ObservedArray c(49);
  c.at(1, 20) = 5.0;
  CHECK(euclidean_distance(a, c) == 5.0);
  CHECK_THROWS_AS(euclidean_distance(a, ObservedArray(48)), ShapeMismatch);
}

TEST_CASE("config validation") {
  RunConfig cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.chunk_size = 30;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.tolerance = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.tolerance = std::nan("");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.tolerance = 0;
  CHECK_NOTHROW(cfg.validate());
  cfg = small_config();
  cfg.filter_mode = FilterMode::kTopK;
  cfg.top_k = 201;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  RunConfig defaults;
  defaults.tolerance = 2e5;
  CHECK(defaults.effective_top_k() == 5);
  defaults.tolerance = 5e4;
  CHECK(defaults.effective_top_k() == 1);
  defaults.top_k = 7;
  CHECK(defaults.effective_top_k() == 7);
}

TEST_CASE("run_batch") {
  const ObservedSeries obs = small_series();
  RunConfig cfg = small_config();

  SUBCASE("huge tolerance accepts everything") {
    cfg.tolerance = 1e15;
    const BatchResult b = run_batch(cfg, obs, 0);
    CHECK(b.accepted_count() == cfg.batch_size);
  }
  SUBCASE("tiny tolerance accepts nothing") {
    cfg.tolerance = 0;
    CHECK(run_batch(cfg, obs, 0).accepted_count() == 0);
  }
  SUBCASE("distances match an independent re-simulation") {
    const BatchResult b = run_batch(cfg, obs, 2);
    const FitTarget target = FitTarget::from_series(obs, cfg.fit_days);
    for (std::size_t i = 0; i < b.size(); i += 17) {
      const PosteriorSample s =
          evaluate_sample(cfg, target, sample_id(2, i, cfg.batch_size));
      CHECK(s.params == b.params[i]);
      CHECK(s.distance == b.distances[i]);
      CHECK(s.run_index == 2);
      CHECK(s.in_batch_index == i);
    }
  }
  SUBCASE("deterministic per run index") {
    const BatchResult a = run_batch(cfg, obs, 4);
    const BatchResult b = run_batch(cfg, obs, 4);
    CHECK(a.distances == b.distances);
    CHECK(run_batch(cfg, obs, 5).distances != a.distances);
  }
  SUBCASE("accepted sets nest as tolerance grows") {
    const BatchResult b = run_batch(cfg, obs, 0);
    std::vector<double> sorted = b.distances;
    std::sort(sorted.begin(), sorted.end());
    std::set<std::size_t> previous;
    for (std::size_t q : {10, 50, 120, 199}) {
      std::set<std::size_t> current;
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (b.distances[i] <= sorted[q]) current.insert(i);
      }
      CHECK(std::includes(current.begin(), current.end(), previous.begin(),
                          previous.end()));
      previous = current;
    }
  }
}

TEST_CASE("chunk_filter") {
  CHECK(chunk_filter(sparse_batch(30000, {}), 10000).empty());
  CHECK(chunk_filter(sparse_batch(30000, {12345}), 10000) ==
        std::vector<ChunkRange>{{10000, 20000}});
  CHECK(chunk_filter(sparse_batch(30000, {3, 10005}), 10000) ==
        std::vector<ChunkRange>{{0, 10000}, {10000, 20000}});
  CHECK(chunk_filter(sparse_batch(30000, {3, 9999}), 10000) ==
        std::vector<ChunkRange>{{0, 10000}});
  SUBCASE("chunk size zero ships the whole batch") {
    CHECK(chunk_filter(sparse_batch(300, {299}), 0) ==
          std::vector<ChunkRange>{{0, 300}});
  }
}

TEST_CASE("top_k_filter") {
  const BatchResult b = synthetic_batch({5, 1, 3}, 4.0);
  const TopKResult r = top_k_filter(b, 2);
  CHECK(r.indices == std::vector<std::size_t>{1, 2});
  CHECK(r.accepted_count == 2);
  CHECK(top_k_filter(b, 3).indices == std::vector<std::size_t>{1, 2, 0});

  SUBCASE("truncation loss is counted") {
    RunConfig cfg = small_config();
    cfg.tolerance = 5.0;
    cfg.filter_mode = FilterMode::kTopK;
    cfg.top_k = 5;
    const BatchResult seven =
        sparse_batch(100, {1, 9, 20, 33, 40, 71, 99});
    const Shipment s = ship_batch(seven, cfg);
    CHECK(s.accepted_count == 7);
    CHECK(s.candidates.size() == 5);
    CHECK(s.accepted_count - host_filter(s, cfg.tolerance).size() == 2);
  }
}

TEST_CASE("shipping and host filtering") {
  RunConfig cfg = small_config();
  cfg.tolerance = 5.0;
  cfg.chunk_size = 10;
  const BatchResult b = sparse_batch(100, {4, 57, 58});
  const Shipment s = ship_batch(b, cfg);
  CHECK(s.candidates.size() == 20);
  const auto kept = host_filter(s, cfg.tolerance);
  CHECK(kept == accepted_samples(b));
  CHECK(kept.front().run_index == 3);

  CHECK(ship_batch(sparse_batch(100, {}), cfg).candidates.empty());
  cfg.filter_mode = FilterMode::kTopK;
  cfg.top_k = 3;
  CHECK(host_filter(ship_batch(b, cfg), cfg.tolerance) == accepted_samples(b));
}

TEST_CASE("infer") {
  const ObservedSeries obs = small_series();

  SUBCASE("huge tolerance finishes in one run") {
    RunConfig cfg = small_config();
    cfg.tolerance = 1e15;
    cfg.batch_size = 100;
    cfg.chunk_size = 10;
    const InferenceResult r = infer(cfg, obs);
    CHECK(r.status == InferenceStatus::kCompleted);
    CHECK(r.stats.runs_executed == 1);
    CHECK(r.samples.size() == 100);
    CHECK(r.stats.acceptance_rate == 1.0);
  }
  SUBCASE("unreachable tolerance exhausts max_runs") {
    RunConfig cfg = small_config();
    cfg.tolerance = 0;
    cfg.max_runs = 3;
    const InferenceResult r = infer(cfg, obs);
    CHECK(r.status == InferenceStatus::kMaxRunsExceeded);
    CHECK(r.samples.empty());
    CHECK(r.stats.runs_executed == 3);
  }
  SUBCASE("deterministic, canonical and within tolerance") {
    RunConfig cfg = small_config();
    cfg.tolerance = 35000;
    const InferenceResult a = infer(cfg, obs);
    const InferenceResult b = infer(cfg, obs);
    CHECK(a.samples == b.samples);
    REQUIRE(a.status == InferenceStatus::kCompleted);
    CHECK(a.samples.size() >= cfg.target_accepted);
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      CHECK(a.samples[i].distance <= cfg.tolerance);
      if (i > 0) {
        const auto& p = a.samples[i - 1];
        const auto& q = a.samples[i];
        CHECK(std::pair(p.run_index, p.in_batch_index) <
              std::pair(q.run_index, q.in_batch_index));
      }
    }
    // Stops at the first run that reaches the target.
    const auto last_run = a.samples.back().run_index;
    CHECK(a.stats.runs_executed == last_run + 1);
    std::size_t before_last = 0;
    for (const auto& s : a.samples) before_last += s.run_index < last_run;
    CHECK(before_last < cfg.target_accepted);
    CHECK(a.stats.acceptance_rate ==
          doctest::Approx(static_cast<double>(a.stats.samples_accepted) /
                          static_cast<double>(a.stats.samples_simulated)));
  }
  SUBCASE("accepted samples reproduce their distance") {
    RunConfig cfg = small_config();
    cfg.tolerance = 35000;
    const FitTarget target = FitTarget::from_series(obs, cfg.fit_days);
    for (const auto& s : infer(cfg, obs).samples) {
      CHECK(evaluate_sample(cfg, target,
                            sample_id(s.run_index, s.in_batch_index,
                                      cfg.batch_size)) == s);
    }
  }
}

TEST_CASE("sequential oracle") {
  const ObservedSeries obs = small_series();
  RunConfig cfg = small_config();

  SUBCASE("matches batched inference") {
    cfg.tolerance = 35000;
    CHECK(infer_sequential_oracle(cfg, obs).samples == infer(cfg, obs).samples);
  }
  SUBCASE("huge tolerance accepts the stream prefix") {
    cfg.tolerance = 1e15;
    cfg.batch_size = 1;
    cfg.chunk_size = 1;
    const InferenceResult r = infer_sequential_oracle(cfg, obs);
    REQUIRE(r.samples.size() == cfg.target_accepted);
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      CHECK(r.samples[i].run_index == i);
    }
  }
  SUBCASE("unreachable tolerance") {
    cfg.tolerance = 0;
    cfg.max_runs = 2;
    const InferenceResult r = infer_sequential_oracle(cfg, obs);
    CHECK(r.samples.empty());
    CHECK(r.status == InferenceStatus::kMaxRunsExceeded);
  }
}

TEST_CASE("mean accepted distance shrinks with tolerance") {
  RunConfig cfg = small_config();
  cfg.batch_size = 2000;
  cfg.chunk_size = 0;
  const BatchResult b = run_batch(cfg, small_series(), 0);
  double previous = std::numeric_limits<double>::infinity();
  for (double eps : {1e7, 1e5, 3e4, 1e4}) {
    double sum = 0;
    std::size_t n = 0;
    for (double d : b.distances) {
      if (d <= eps) {
        sum += d;
        ++n;
      }
    }
    if (n == 0) break;
    CHECK(sum / static_cast<double>(n) <= previous);
    previous = sum / static_cast<double>(n);
  }
}
