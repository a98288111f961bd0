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

#include "parabc/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parabc/errors.hpp"

namespace parabc {

ObservedArray Trajectory::observed_view() const {
  ObservedArray out(states.size());
  for (std::size_t day = 0; day < states.size(); ++day) {
    out.at(0, day) = states[day].A;
    out.at(1, day) = states[day].R;
    out.at(2, day) = states[day].D;
  }
  return out;
}

EpidemicState init_state(const DayZero& day0, double kappa,
                         double population) {
  EpidemicState state;
  state.A = day0.A;
  state.R = day0.R;
  state.D = day0.D;
  state.I = std::floor(kappa * day0.A);
  state.Ru = 0.0;
  state.S = population - (day0.A + day0.R + day0.D + state.I);
  if (!(state.S > 0.0)) {
    throw NonPositiveSusceptible(
        "initial susceptible count " + std::to_string(state.S) +
        " is not positive (population " + std::to_string(population) +
        ", kappa " + std::to_string(kappa) + ")");
  }
  return state;
}

double infection_rate(const ModelParams& params, double A, double R,
                      double D) {
  // std::pow gives 0^0 = 1 and 0^n = 0 for n > 0.
  return params.alpha0 + params.alpha / (1.0 + std::pow(A + R + D, params.n));
}

HazardVector hazard(const ModelParams& params, const EpidemicState& state,
                    double population) {
  const double g = infection_rate(params, state.A, state.R, state.D);
  return {
      g * state.S * state.I / population,
      params.gamma * state.I,
      params.beta * state.A,
      params.delta * state.A,
      params.beta * params.eta * state.I,
  };
}

double transition_spread(double h, GaussianSpread spread) {
  switch (spread) {
    case GaussianSpread::kVarianceSqrtH:
      return std::sqrt(std::sqrt(h));
    case GaussianSpread::kVarianceH:
      return std::sqrt(h);
  }
  return 0.0;
}

double draw_transition(double h, double z, GaussianSpread spread) {
  return std::floor(h + z * transition_spread(h, spread));
}

Transitions sample_transitions(const HazardVector& h, RandomStream& rng,
                               GaussianSpread spread) {
  Transitions counts;
  const auto rates = h.to_array();
  for (std::size_t i = 0; i < rates.size(); ++i) {
    counts[i] = std::max(0.0, draw_transition(rates[i], rng.normal(), spread));
  }
  return counts;
}

EpidemicState apply_transitions(const EpidemicState& state,
                                const Transitions& counts) {
  // Caps are taken against start-of-day sources; shared sources (I and A)
  // are drained in hazard order.
  const double s_to_i = std::min(counts[0], state.S);
  const double i_to_a = std::min(counts[1], state.I);
  const double a_to_r = std::min(counts[2], state.A);
  const double a_to_d = std::min(counts[3], state.A - a_to_r);
  const double i_to_ru = std::min(counts[4], state.I - i_to_a);

  EpidemicState next;
  next.S = state.S - s_to_i;
  next.I = state.I + s_to_i - i_to_a - i_to_ru;
  next.A = state.A + i_to_a - a_to_r - a_to_d;
  next.R = state.R + a_to_r;
  next.D = state.D + a_to_d;
  next.Ru = state.Ru + i_to_ru;
  return next;
}

EpidemicState step(const EpidemicState& state, const ModelParams& params,
                   double population, RandomStream& rng,
                   GaussianSpread spread) {
  return apply_transitions(
      state, sample_transitions(hazard(params, state, population), rng, spread));
}

Trajectory simulate(const ModelParams& params, const EpidemicState& init,
                    std::size_t days, double population, RandomStream& rng,
                    GaussianSpread spread) {
  Trajectory traj;
  traj.states.reserve(days);
  traj.states.push_back(init);
  for (std::size_t day = 1; day < days; ++day) {
    traj.states.push_back(
        step(traj.states.back(), params, population, rng, spread));
  }
  return traj;
}

void simulate_observed(const ModelParams& params, const EpidemicState& init,
                       double population, RandomStream& rng,
                       GaussianSpread spread, ObservedArray& out) {
  EpidemicState state = init;
  for (std::size_t day = 0; day < out.days(); ++day) {
    if (day > 0) state = step(state, params, population, rng, spread);
    out.at(0, day) = state.A;
    out.at(1, day) = state.R;
    out.at(2, day) = state.D;
  }
}

std::vector<ObservedArray> simulate_batch(
    std::span<const ModelParams> params_batch, const DayZero& day0,
    std::size_t days, double population, std::uint64_t seed,
    std::uint64_t first_sample_id, GaussianSpread spread) {
  std::vector<ObservedArray> rows;
  rows.reserve(params_batch.size());
  for (std::size_t b = 0; b < params_batch.size(); ++b) {
    const ModelParams& params = params_batch[b];
    RandomStream rng(seed, StreamDomain::kSimulation, first_sample_id + b);
    ObservedArray& row = rows.emplace_back(days);
    simulate_observed(params, init_state(day0, params.kappa, population),
                      population, rng, spread, row);
  }
  return rows;
}

}  // namespace parabc
