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

#ifndef DIMC_LIKEM_HPP
#define DIMC_LIKEM_HPP

#include "dimc/chain.hpp"
#include "dimc/emulation.hpp"
#include "dimc/gp.hpp"
#include "dimc/prior.hpp"
#include "dimc/proposal.hpp"
#include "dimc/samplers.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace dimc {

struct LikemSettings {
  std::size_t particles = 20;
  /// Auxiliary draws per telescoping hop.
  std::size_t n = 10000;
  std::size_t prerun_iterations = 2000;
  int prerun_cycles = 90;
  InnerKind inner = InnerKind::GibbsSweep;
  PoolOptions pool;
  double ess_floor = 50.0;
  GpFitOptions gp;
};

/// Everything the surrogate MCMC stage needs, so it can be rerun without
/// simulating again.
struct EmulatorSnapshot {
  Matrix particles;
  Vector values;
  Vector noise;
  GpSurrogate gp;
  nlohmann::json info;

  nlohmann::json to_json() const;
  static EmulatorSnapshot from_json(const nlohmann::json& j);
};

void write_emulator_snapshot(const std::filesystem::path& path, const EmulatorSnapshot& snapshot);
EmulatorSnapshot read_emulator_snapshot(const std::filesystem::path& path);

/// DMH pre-run, space-filling particle selection, telescoped
/// log-likelihood estimates at the particles and a GP fit through them.
template <class Model>
EmulatorSnapshot build_emulator(const Model& model, const typename Model::State& data, const Prior& prior,
                                const RandomWalkProposal& proposal, const Vector& init, const LikemSettings& settings,
                                RngStream& rng) {
  if (settings.particles < 2) {
    throw std::invalid_argument("LikeEm needs at least 2 particles");
  }
  if (settings.prerun_iterations < settings.particles) {
    throw std::invalid_argument("LikeEm pre-run must be at least as long as the particle count");
  }
  AuxSettings aux;
  aux.mode = AuxMode::Dmh;
  aux.inner = settings.inner;
  aux.m = settings.prerun_cycles;
  AuxiliaryVariableSampler<Model> prerun(model, data, prior, proposal, aux, init);
  RngStream prerun_rng = rng.split(1);
  const std::size_t skip = settings.prerun_iterations / 10;
  Matrix visited(static_cast<Eigen::Index>(settings.prerun_iterations - skip), init.size());
  std::size_t accepted = 0;
  for (std::size_t t = 0; t < settings.prerun_iterations; ++t) {
    accepted += prerun.step(t, prerun_rng) ? 1 : 0;
    if (t >= skip) visited.row(static_cast<Eigen::Index>(t - skip)) = prerun.theta().transpose();
  }
  EmulatorSnapshot snap{farthest_point_thinning(visited, settings.particles), {}, {},
                        GpSurrogate(Matrix::Zero(1, init.size()), Vector::Zero(1), Vector::Zero(1),
                                    GpHyperparameters{1.0, Vector::Ones(init.size()), 0.0}),
                        {}};
  TelescopeOptions tel{settings.n, settings.pool, settings.ess_floor};
  RngStream est_rng = rng.split(2);
  const LoglikEstimates est =
      estimate_loglik_at_particles(model, snap.particles, model.suffstats(data), tel, data, est_rng);
  snap.values = est.values;
  snap.noise = est.noise;
  snap.gp = gp_fit(snap.particles, snap.values, snap.noise, settings.gp);
  snap.info = {{"particles", settings.particles},
               {"n", settings.n},
               {"prerun_iterations", settings.prerun_iterations},
               {"prerun_cycles", settings.prerun_cycles},
               {"prerun_acceptance", static_cast<double>(accepted) / static_cast<double>(settings.prerun_iterations)},
               {"min_ess", est.min_ess},
               {"gp_jitter", snap.gp.jitter()}};
  return snap;
}

/// Random-walk MH on theta with the GP posterior mean standing in for the
/// log-likelihood.
class SurrogateSampler final : public ChainSampler {
 public:
  SurrogateSampler(GpSurrogate gp, Prior prior, RandomWalkProposal proposal, Vector init,
                   nlohmann::json info = nlohmann::json::object());

  std::string label() const override { return "likem"; }
  std::size_t param_dim() const override { return static_cast<std::size_t>(theta_.size()); }
  bool step(std::size_t iteration, RngStream& rng) override;
  void current_row(std::span<double> row) const override;
  nlohmann::json tuning() const override;
  nlohmann::json diagnostics() const override { return info_; }
  nlohmann::json save_state() const override;
  void load_state(const nlohmann::json& j) override;

  const Vector& theta() const { return theta_; }

 private:
  GpSurrogate gp_;
  Prior prior_;
  RandomWalkProposal proposal_;
  Vector theta_;
  double log_target_;
  nlohmann::json info_;
};

}  // namespace dimc

#endif  // DIMC_LIKEM_HPP
