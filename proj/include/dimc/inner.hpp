// Copyright 2026 The dimc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DIMC_INNER_HPP
#define DIMC_INNER_HPP

#include "dimc/linalg.hpp"
#include "dimc/models.hpp"
#include "dimc/rng.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace dimc {

/// Fixed-theta update kernels. Each leaves f(.|theta) invariant.
enum class InnerKind {
  GibbsSweep,    ///< systematic raster sweep of single-site / single-dyad conditionals
  SwendsenWang,  ///< Potts only
  EdgeToggle,    ///< ERGM only: n(n-1)/2 Metropolis dyad toggles per cycle
};

std::string_view to_string(InnerKind kind);
InnerKind parse_inner_kind(std::string_view text);

struct InnerSamplerConfig {
  InnerKind kind = InnerKind::GibbsSweep;
  int cycles = 1;
  std::uint64_t seed = 0;
};

void gibbs_cycle(const PottsModel& model, PottsLattice& x, const Vector& theta, RngStream& rng);
void gibbs_cycle(const ErgmModel& model, UndirectedGraph& x, const Vector& theta, RngStream& rng);
void gibbs_cycle(const IsingNetworkModel& model, ItemResponseMatrix& x, const Vector& theta, RngStream& rng);

/// Bonds matching neighbors with probability 1 - e^-theta, then recolors
/// every cluster uniformly. Throws std::domain_error for theta < 0.
void swendsen_wang_cycle(PottsLattice& x, double theta, RngStream& rng);

void edge_toggle_cycle(const ErgmModel& model, UndirectedGraph& x, const Vector& theta, RngStream& rng);

template <class Model>
void validate_inner_kind(const Model&, InnerKind kind) {
  if (kind == InnerKind::SwendsenWang && !std::is_same_v<Model, PottsModel>) {
    throw std::invalid_argument("Swendsen-Wang updates are only valid for the Potts model");
  }
  if (kind == InnerKind::EdgeToggle && !std::is_same_v<Model, ErgmModel>) {
    throw std::invalid_argument("edge-toggle updates are only valid for the ERGM");
  }
}

/// Runs \p cycles updates of \p kind in place.
template <class Model>
void run_cycles(const Model& model, typename Model::State& x, const Vector& theta, InnerKind kind, int cycles,
                RngStream& rng) {
  validate_inner_kind(model, kind);
  for (int c = 0; c < cycles; ++c) {
    if constexpr (std::is_same_v<Model, PottsModel>) {
      if (kind == InnerKind::SwendsenWang) {
        check_dimension(1, theta, "swendsen_wang theta");
        swendsen_wang_cycle(x, theta(0), rng);
        continue;
      }
    }
    if constexpr (std::is_same_v<Model, ErgmModel>) {
      if (kind == InnerKind::EdgeToggle) {
        edge_toggle_cycle(model, x, theta, rng);
        continue;
      }
    }
    gibbs_cycle(model, x, theta, rng);
  }
}

/// Runs config.cycles updates from \p init with a fresh stream seeded by
/// config.seed; m = 0 returns \p init unchanged.
template <class Model>
typename Model::State simulate(const Model& model, const Vector& theta, const InnerSamplerConfig& config,
                               typename Model::State init) {
  if (config.cycles < 0) {
    throw std::invalid_argument("simulate: cycles must be non-negative");
  }
  model.validate(init);
  check_dimension(model.dim(), theta, "simulate theta");
  RngStream rng(config.seed);
  run_cycles(model, init, theta, config.kind, config.cycles, rng);
  return init;
}

}  // namespace dimc

#endif  // DIMC_INNER_HPP
