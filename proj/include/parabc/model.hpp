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
#include <span>
#include <string_view>
#include <vector>

#include "parabc/rng.hpp"

namespace parabc {

/// The eight epidemic-model parameters, in their canonical order.
struct ModelParams {
  double alpha0 = 0.0;  // base infection rate (1/day)
  double alpha = 0.0;   // infection-rate coefficient (1/day)
  double n = 0.0;       // infection-rate exponent
  double beta = 0.0;    // recovery rate (1/day)
  double gamma = 0.0;   // positive-test rate (1/day)
  double delta = 0.0;   // fatality rate (1/day)
  double eta = 0.0;     // testing-protocol effectiveness
  double kappa = 0.0;   // initial unobserved-infected fraction of A

  static constexpr std::size_t kSize = 8;
  static constexpr std::array<std::string_view, kSize> kNames = {
      "alpha0", "alpha", "n", "beta", "gamma", "delta", "eta", "kappa"};

  std::array<double, kSize> to_array() const noexcept {
    return {alpha0, alpha, n, beta, gamma, delta, eta, kappa};
  }
  static ModelParams from_array(const std::array<double, kSize>& v) noexcept {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Sub-population counts for one day. Values are integral but stored as
/// doubles; every count below 2^53 is exact.
struct EpidemicState {
  double S = 0.0;   // susceptible
  double I = 0.0;   // undocumented infected
  double A = 0.0;   // active confirmed
  double R = 0.0;   // confirmed recovered
  double D = 0.0;   // confirmed deaths
  double Ru = 0.0;  // unconfirmed removed

  double total() const noexcept { return S + I + A + R + D + Ru; }

  friend bool operator==(const EpidemicState&, const EpidemicState&) = default;
};

/// Expected daily flows, ordered S->I, I->A, A->R, A->D, I->Ru.
struct HazardVector {
  double s_to_i = 0.0;
  double i_to_a = 0.0;
  double a_to_r = 0.0;
  double a_to_d = 0.0;
  double i_to_ru = 0.0;

  std::array<double, 5> to_array() const noexcept {
    return {s_to_i, i_to_a, a_to_r, a_to_d, i_to_ru};
  }
};

/// Realized daily flows (non-negative integers), same order as HazardVector.
using Transitions = std::array<double, 5>;

/// Observed (A, R, D) counts of day zero.
struct DayZero {
  double A = 0.0;
  double R = 0.0;
  double D = 0.0;
};

/// How the Gaussian tau-leap approximation spreads around the hazard.
enum class GaussianSpread {
  kVarianceSqrtH,  // variance sqrt(h), i.e. standard deviation h^(1/4)
  kVarianceH,      // Poisson-matching variance h
};

/// Row-major [3 x days] array of simulated or observed (A, R, D).
class ObservedArray {
 public:
  ObservedArray() = default;
  explicit ObservedArray(std::size_t days) : days_(days), data_(3 * days) {}

  std::size_t days() const noexcept { return days_; }
  double& at(std::size_t observable, std::size_t day) {
    return data_[observable * days_ + day];
  }
  double at(std::size_t observable, std::size_t day) const {
    return data_[observable * days_ + day];
  }
  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  friend bool operator==(const ObservedArray&, const ObservedArray&) = default;

 private:
  std::size_t days_ = 0;
  std::vector<double> data_;
};

struct Trajectory {
  std::vector<EpidemicState> states;  // states[0] is the initial state

  std::size_t days() const noexcept { return states.size(); }
  ObservedArray observed_view() const;
};

EpidemicState init_state(const DayZero& day0, double kappa, double population);

double infection_rate(const ModelParams& params, double A, double R, double D);

HazardVector hazard(const ModelParams& params, const EpidemicState& state,
                    double population);

/// Standard deviation of the Gaussian draw for hazard `h`.
double transition_spread(double h, GaussianSpread spread);

/// floor(h + z * spread(h)) without clamping. Exposed for distribution tests.
double draw_transition(double h, double z, GaussianSpread spread);

/// One clamped draw per component; always consumes five normals.
Transitions sample_transitions(const HazardVector& h, RandomStream& rng,
                               GaussianSpread spread);

/// Applies flows in hazard order, capping each so no source goes negative.
EpidemicState apply_transitions(const EpidemicState& state,
                                const Transitions& counts);

EpidemicState step(const EpidemicState& state, const ModelParams& params,
                   double population, RandomStream& rng,
                   GaussianSpread spread);

Trajectory simulate(const ModelParams& params, const EpidemicState& init,
                    std::size_t days, double population, RandomStream& rng,
                    GaussianSpread spread = GaussianSpread::kVarianceSqrtH);

/// Writes the (A, R, D) projection of a simulation directly into `out`
/// (which must hold `out.days()` days) without storing the full states.
void simulate_observed(const ModelParams& params, const EpidemicState& init,
                       double population, RandomStream& rng,
                       GaussianSpread spread, ObservedArray& out);

/// Simulates each row from its own kappa-dependent initial state. Row b
/// uses the simulation substream (seed, first_sample_id + b), so splitting
/// a batch and offsetting first_sample_id reproduces the same rows.
std::vector<ObservedArray> simulate_batch(
    std::span<const ModelParams> params_batch, const DayZero& day0,
    std::size_t days, double population, std::uint64_t seed,
    std::uint64_t first_sample_id,
    GaussianSpread spread = GaussianSpread::kVarianceSqrtH);

}  // namespace parabc
