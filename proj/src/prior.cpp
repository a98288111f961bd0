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

#include "parabc/prior.hpp"

#include <cmath>
#include <string>

#include "parabc/errors.hpp"

namespace parabc {

void PriorSpec::validate() const {
  for (std::size_t i = 0; i < ModelParams::kSize; ++i) {
    if (!(lower[i] < upper[i]) || !std::isfinite(lower[i]) ||
        !std::isfinite(upper[i])) {
      throw InvalidPrior("prior bound for '" +
                         std::string(ModelParams::kNames[i]) +
                         "' requires finite lower < upper, got [" +
                         std::to_string(lower[i]) + ", " +
                         std::to_string(upper[i]) + ")");
    }
  }
}

ModelParams sample_prior_one(const PriorSpec& spec, std::uint64_t seed,
                             std::uint64_t sample_id) {
  RandomStream rng(seed, StreamDomain::kPrior, sample_id);
  std::array<double, ModelParams::kSize> values;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double width = spec.upper[i] - spec.lower[i];
    double v = spec.lower[i] + width * rng.uniform();
    // Rounding can land exactly on the upper bound for tiny widths.
    if (v >= spec.upper[i]) v = std::nextafter(spec.upper[i], spec.lower[i]);
    values[i] = v;
  }
  return ModelParams::from_array(values);
}

std::vector<ModelParams> sample_prior(const PriorSpec& spec, std::size_t count,
                                      std::uint64_t seed,
                                      std::uint64_t first_sample_id) {
  spec.validate();
  std::vector<ModelParams> out;
  out.reserve(count);
  for (std::size_t b = 0; b < count; ++b) {
    out.push_back(sample_prior_one(spec, seed, first_sample_id + b));
  }
  return out;
}

}  // namespace parabc
