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

#ifndef DIMC_SPIKE_SLAB_HPP
#define DIMC_SPIKE_SLAB_HPP

#include "dimc/chain.hpp"
#include "dimc/inner.hpp"
#include "dimc/models.hpp"
#include "dimc/proposal.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace dimc {

/// Hierarchy constants. The precision 1/sigma^2 is Uniform(tau_lower,
/// tau_upper); omega = 1 + Y with Y ~ Gamma(shape, rate).
struct SpikeSlabHyper {
  double tau_lower = 4.0;
  double tau_upper = 100.0;
  double y_shape = 1.0;
  double y_rate = 0.01;
};

struct SpikeSlabState {
  Vector theta;
  std::vector<int> lambda;
  double sigma2 = 0.25;
  double omega = 2.0;
};

struct SpikeSlabSettings {
  /// Inner Gibbs sweeps per DMH auxiliary draw.
  int m = 1;
  /// false: the data term is dropped and the chain targets the prior.
  bool use_likelihood = true;
  Vector theta_scales;  ///< initial random-walk sd per coordinate
  std::size_t adapt_until = 0;
  double log_tau_step = 1.0;
  double log_y_step = 1.0;
  SpikeSlabHyper hyper;
};

/// Log density of theta given the indicators and variances:
/// theta_i ~ N(0, omega^2 sigma^2) if lambda_i = 1, else N(0, sigma^2).
double spike_slab_log_conditional(const Vector& theta, const std::vector<int>& lambda, double sigma2, double omega);

/// Conditional P(lambda_i = 1 | theta_i, sigma^2, omega) under Bernoulli(1/2).
double inclusion_probability(double theta_i, double sigma2, double omega);

/// DMH over (theta, lambda, sigma^2, omega) for the Ising network model:
/// a block theta move, exact lambda draws, and log-scale random walks on
/// 1/sigma^2 (reflected at its bounds) and on omega - 1.
class SpikeSlabSampler final : public ChainSampler {
 public:
  SpikeSlabSampler(IsingNetworkModel model, ItemResponseMatrix data, SpikeSlabSettings settings,
                   SpikeSlabState init);

  std::string label() const override { return "spike_slab_dmh"; }
  std::size_t param_dim() const override { return model_.dim(); }
  std::vector<std::string> columns() const override;
  bool step(std::size_t iteration, RngStream& rng) override;
  void current_row(std::span<double> row) const override;
  nlohmann::json tuning() const override;
  nlohmann::json diagnostics() const override;
  nlohmann::json save_state() const override;
  void load_state(const nlohmann::json& j) override;

  const SpikeSlabState& state() const { return state_; }

 private:
  bool update_theta(RngStream& rng);
  void update_lambda(RngStream& rng);
  void update_tau(RngStream& rng);
  void update_omega(RngStream& rng);

  IsingNetworkModel model_;
  ItemResponseMatrix data_;
  Vector s_data_;
  SpikeSlabSettings settings_;
  RandomWalkProposal proposal_;
  SpikeSlabState state_;
  std::size_t tau_accepted_ = 0;
  std::size_t omega_accepted_ = 0;
  std::size_t steps_ = 0;
};

/// Default starting point: theta = 0, all indicators off, sigma^2 at the
/// midpoint of its precision range and omega = 1 + E[Y].
SpikeSlabState spike_slab_initial_state(std::size_t dim, const SpikeSlabHyper& hyper = {});

}  // namespace dimc

#endif  // DIMC_SPIKE_SLAB_HPP
