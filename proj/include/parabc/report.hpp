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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "parabc/abc.hpp"
#include "parabc/ingest.hpp"

namespace parabc {

// Posterior files ---------------------------------------------------------

inline constexpr const char* kPosteriorHeader =
    "run,index,distance,alpha0,alpha,n,beta,gamma,delta,eta,kappa";

std::string posterior_csv(const std::vector<PosteriorSample>& samples);
std::vector<PosteriorSample> parse_posterior_csv(const std::string& text);
std::vector<PosteriorSample> read_posterior_csv(
    const std::filesystem::path& path);

/// Every RunStats field plus run settings and posterior parameter means.
std::string stats_json(const RunStats& stats, const RunConfig& config,
                       const std::vector<PosteriorSample>& samples,
                       InferenceStatus status);

std::array<double, ModelParams::kSize> posterior_means(
    const std::vector<PosteriorSample>& samples);

// Projections -------------------------------------------------------------

/// Nearest-rank percentile of an ascending-sorted sample; p in [0, 100].
double nearest_rank(const std::vector<double>& sorted, double p);

struct Band {
  double low = 0.0;
  double median = 0.0;
  double high = 0.0;
};

struct ProjectionBands {
  std::size_t days = 0;
  double low_percentile = 5.0;
  double high_percentile = 95.0;
  std::vector<std::array<Band, 3>> bands;  // [day][A, R, D]
  std::vector<ObservedArray> trajectories;  // one per posterior sample

  std::string to_csv() const;
};

struct ProjectionOptions {
  std::size_t days = 120;
  double low_percentile = 5.0;
  double high_percentile = 95.0;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  GaussianSpread spread = GaussianSpread::kVarianceSqrtH;
};

/// One simulation per posterior sample from the series' day 0, each
/// initialized with the sample's own kappa.
ProjectionBands project(const std::vector<PosteriorSample>& posterior,
                        const ObservedSeries& series,
                        const ProjectionOptions& options = {});

/// Fraction of days in [0, days) where every observed value lies inside
/// its band.
double band_coverage(const ProjectionBands& bands, const ObservedSeries& series,
                     std::size_t days);

// Histograms --------------------------------------------------------------

struct ParameterHistogram {
  std::string name;
  std::vector<double> edges;  // bins + 1 edges over the prior support
  std::vector<std::size_t> counts;
};

struct HistogramExport {
  std::size_t sample_count = 0;
  std::vector<ParameterHistogram> parameters;

  std::string to_json() const;
};

HistogramExport histogram(const std::vector<PosteriorSample>& posterior,
                          const PriorSpec& prior, std::size_t bins = 20);

}  // namespace parabc
