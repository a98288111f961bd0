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
#include <cstdint>
#include <vector>

#include "parabc/model.hpp"

namespace parabc {

/// Independent uniform prior per coordinate, half-open [lower, upper).
struct PriorSpec {
  std::array<double, ModelParams::kSize> lower{0, 0, 0, 0, 0, 0, 0, 0};
  std::array<double, ModelParams::kSize> upper{1, 100, 2, 1, 1, 1, 1, 2};

  /// Throws InvalidPrior unless lower[i] < upper[i] for every coordinate.
  void validate() const;
};

/// Draws one parameter vector from the prior substream of `sample_id`.
ModelParams sample_prior_one(const PriorSpec& spec, std::uint64_t seed,
                             std::uint64_t sample_id);

/// Draws `count` samples for sample ids [first_sample_id, first_sample_id +
/// count).
std::vector<ModelParams> sample_prior(const PriorSpec& spec, std::size_t count,
                                      std::uint64_t seed,
                                      std::uint64_t first_sample_id = 0);

}  // namespace parabc
