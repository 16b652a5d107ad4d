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

#ifndef DIMC_SAMPLERS_HPP
#define DIMC_SAMPLERS_HPP

#include "dimc/chain.hpp"
#include "dimc/emulation.hpp"
#include "dimc/enumeration.hpp"
#include "dimc/errors.hpp"
#include "dimc/inner.hpp"
#include "dimc/io.hpp"
#include "dimc/linalg.hpp"
#include "dimc/models.hpp"
#include "dimc/prior.hpp"
#include "dimc/proposal.hpp"
#include "dimc/rng.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace dimc {

struct StepOutcome {
  Vector theta;
  bool accepted = false;
};

/// Log acceptance ratio of the exchange move theta -> proposal given the
/// auxiliary statistics S(x*) drawn at the proposal. The random-walk
/// proposal is symmetric so q cancels; c(.) never appears.
inline double exchange_log_ratio(const Prior& prior, const Vector& theta, const Vector& proposal,
                                 const Vector& s_data, const Vector& s_aux) {
  return prior.log_density(proposal) - prior.log_density(theta) + (proposal - theta).dot(s_data) +
         (theta - proposal).dot(s_aux);
}

inline bool metropolis_accept(double log_ratio, RngStream& rng) {
  return log_ratio >= 0.0 || std::log(rng.uniform_open()) < log_ratio;
}

/// One exchange-type move with auxiliary statistics from \p draw(theta*, rng).
template <class AuxDraw>
StepOutcome auxiliary_variable_step(const Vector& theta, const Vector& s_data, const Prior& prior,
                                    const RandomWalkProposal& proposal, AuxDraw&& draw, RngStream& rng) {
  Vector candidate = proposal.propose(theta, rng);
  if (!prior.in_support(candidate)) {
    return {theta, false};
  }
  const Vector s_aux = draw(candidate, rng);
  if (metropolis_accept(exchange_log_ratio(prior, theta, candidate, s_data, s_aux), rng)) {
    return {std::move(candidate), true};
  }
  return {theta, false};
}

/// Exchange algorithm step with an exact auxiliary draw.
template <class Model>
StepOutcome exchange_step(const Vector& theta, const Vector& s_data, const Prior& prior,
                          const RandomWalkProposal& proposal, const Enumeration<Model>& exact, RngStream& rng) {
  return auxiliary_variable_step(
      theta, s_data, prior, proposal,
      [&](const Vector& candidate, RngStream& r) { return exact.sample_stats(candidate, r); }, rng);
}

/// Double Metropolis-Hastings step: the exact draw is replaced by m inner
/// cycles started at the observed data.
template <class Model>
StepOutcome dmh_step(const Vector& theta, const Model& model, const typename Model::State& data,
                     const Vector& s_data, const Prior& prior, const RandomWalkProposal& proposal, InnerKind inner,
                     int m, RngStream& rng) {
  if (m < 1) {
    throw std::invalid_argument("dmh_step: inner length m must be at least 1");
  }
  return auxiliary_variable_step(
      theta, s_data, prior, proposal,
      [&](const Vector& candidate, RngStream& r) {
        typename Model::State aux = data;
        run_cycles(model, aux, candidate, inner, m, r);
        return model.suffstats(aux);
      },
      rng);
}

/// Coordinate-wise scaled L1 distance between summaries.
inline double abc_distance(const Vector& a, const Vector& b, const Vector& scales) {
  return ((a - b).array().abs() / scales.array()).sum();
}

/// ABC-MCMC step: the prior/proposal ratio is evaluated only when the
/// simulated summaries fall strictly within epsilon of the data.
template <class Model>
StepOutcome abc_mcmc_step(const Vector& theta, const Model& model, const typename Model::State& data,
                          const Vector& s_data, const Prior& prior, const RandomWalkProposal& proposal,
                          double epsilon, const Vector& scales, InnerKind inner, int m, RngStream& rng,
                          bool* within = nullptr) {
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("abc_mcmc_step: epsilon must be non-negative");
  }
  if (within) *within = false;
  Vector candidate = proposal.propose(theta, rng);
  if (!prior.in_support(candidate)) {
    return {theta, false};
  }
  typename Model::State aux = data;
  run_cycles(model, aux, candidate, inner, m, rng);
  if (!(abc_distance(s_data, model.suffstats(aux), scales) < epsilon)) {
    return {theta, false};
  }
  if (within) *within = true;
  if (metropolis_accept(prior.log_density(candidate) - prior.log_density(theta), rng)) {
    return {std::move(candidate), true};
  }
  return {theta, false};
}

// ---------------------------------------------------------------------------

enum class AuxMode { Exchange, Dmh, Abc };

struct AuxSettings {
  AuxMode mode = AuxMode::Dmh;
  InnerKind inner = InnerKind::GibbsSweep;
  /// Inner cycles per auxiliary draw (DMH, ABC).
  int m = 1;
  /// ABC threshold; infinity disables the distance check.
  double epsilon = std::numeric_limits<double>::infinity();
  /// ABC distance scales; empty means all ones.
  Vector scales;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
};

/// Exchange, DMH and ABC-MCMC over theta as a ChainSampler.
template <class Model>
class AuxiliaryVariableSampler final : public ChainSampler {
 public:
  using State = typename Model::State;

  AuxiliaryVariableSampler(Model model, State data, Prior prior, RandomWalkProposal proposal, AuxSettings settings,
                           Vector init)
      : model_(std::move(model)),
        data_(std::move(data)),
        prior_(std::move(prior)),
        proposal_(std::move(proposal)),
        settings_(std::move(settings)),
        theta_(std::move(init)) {
    model_.validate(data_);
    s_data_ = model_.suffstats(data_);
    check_dimension(model_.dim(), theta_, "initial theta");
    check_dimension(model_.dim(), prior_.mean(), "prior");
    if (proposal_.dim() != model_.dim()) {
      throw DimensionMismatch("proposal dimension does not match the model");
    }
    if (!prior_.in_support(theta_)) {
      throw std::invalid_argument("initial theta lies outside the prior support");
    }
    if (settings_.mode == AuxMode::Exchange) {
      try {
        exact_ = std::make_shared<const Enumeration<Model>>(model_, settings_.enumeration_cap);
      } catch (const IntractableError& e) {
        throw IntractableError(std::string("exchange algorithm needs exact sampling, which is unavailable (") +
                               e.what() + "); use the dmh sampler instead");
      }
    } else {
      validate_inner_kind(model_, settings_.inner);
      if (settings_.m < 1) {
        throw std::invalid_argument("inner length m must be at least 1");
      }
    }
    if (settings_.scales.size() == 0) {
      settings_.scales = Vector::Ones(static_cast<Eigen::Index>(model_.dim()));
    }
    check_dimension(model_.dim(), settings_.scales, "ABC distance scales");
  }

  std::string label() const override {
    switch (settings_.mode) {
      case AuxMode::Exchange:
        return "exchange";
      case AuxMode::Dmh:
        return "dmh";
      case AuxMode::Abc:
        return "abc";
    }
    return "unknown";
  }

  std::size_t param_dim() const override { return model_.dim(); }

  bool step(std::size_t iteration, RngStream& rng) override {
    StepOutcome out;
    switch (settings_.mode) {
      case AuxMode::Exchange:
        out = exchange_step(theta_, s_data_, prior_, proposal_, *exact_, rng);
        break;
      case AuxMode::Dmh:
        out = dmh_step(theta_, model_, data_, s_data_, prior_, proposal_, settings_.inner, settings_.m, rng);
        break;
      case AuxMode::Abc: {
        bool within = false;
        out = abc_mcmc_step(theta_, model_, data_, s_data_, prior_, proposal_, settings_.epsilon,
                            settings_.scales, settings_.inner, settings_.m, rng, &within);
        within_ += within ? 1 : 0;
        break;
      }
    }
    theta_ = std::move(out.theta);
    proposal_.record(iteration, theta_, out.accepted);
    return out.accepted;
  }

  void current_row(std::span<double> row) const override {
    std::copy(theta_.data(), theta_.data() + theta_.size(), row.begin());
  }

  nlohmann::json tuning() const override {
    nlohmann::json j;
    j["inner"] = std::string(to_string(settings_.inner));
    if (settings_.mode != AuxMode::Exchange) j["m"] = settings_.m;
    if (settings_.mode == AuxMode::Abc) {
      j["epsilon"] = std::isfinite(settings_.epsilon) ? nlohmann::json(settings_.epsilon) : nlohmann::json("inf");
      j["distance_scales"] = to_std(settings_.scales);
    }
    j["prior"] = prior_.to_json();
    j["proposal_adapt_until"] = proposal_.adapt_until();
    return j;
  }

  nlohmann::json diagnostics() const override {
    nlohmann::json j;
    const Matrix& cov = proposal_.covariance();
    j["proposal_covariance"] = std::vector<double>(cov.data(), cov.data() + cov.size());
    if (settings_.mode == AuxMode::Abc) {
      j["within_epsilon"] = within_;
    }
    return j;
  }

  nlohmann::json save_state() const override {
    return {{"theta", to_std(theta_)}, {"proposal", proposal_.save_state()}, {"within", within_}};
  }

  void load_state(const nlohmann::json& j) override {
    theta_ = to_vector(j.at("theta").get<std::vector<double>>());
    proposal_.load_state(j.at("proposal"));
    within_ = j.at("within").get<std::size_t>();
  }

  const Vector& theta() const { return theta_; }
  const Vector& data_stats() const { return s_data_; }

 private:
  Model model_;
  State data_;
  Vector s_data_;
  Prior prior_;
  RandomWalkProposal proposal_;
  AuxSettings settings_;
  std::shared_ptr<const Enumeration<Model>> exact_;
  Vector theta_;
  std::size_t within_ = 0;
};

// ---------------------------------------------------------------------------

struct AlrSettings {
  InnerKind inner = InnerKind::GibbsSweep;
  /// Inner cycles per particle per outer iteration.
  int inner_cycles = 1;
  /// Reservoir size per particle for proposal-time reweighting.
  std::size_t pool_cap = 100000;
};

/// Adaptive normalizing-function approximation at a fixed particle set.
/**
 * Each particle runs a persistent inner chain at its own theta, one cycle
 * per outer iteration. log c is estimated at every particle by telescoping
 * importance-sampling ratios along a nearest-particle tree using all draws
 * so far (running log-sum-exp accumulators), and at an arbitrary theta by
 * reweighting the nearest particle's reservoir. The outer chain is MH on
 * theta with these running estimates in place of log c.
 */
template <class Model>
class AlrSampler final : public ChainSampler {
 public:
  using State = typename Model::State;

  AlrSampler(Model model, State data, Prior prior, RandomWalkProposal proposal, Matrix particles,
             AlrSettings settings, Vector init)
      : model_(std::move(model)),
        data_(std::move(data)),
        prior_(std::move(prior)),
        proposal_(std::move(proposal)),
        particles_(std::move(particles)),
        settings_(settings),
        theta_(std::move(init)) {
    if (particles_.rows() < 2) {
      throw std::invalid_argument("ALR needs at least 2 particles, got " + std::to_string(particles_.rows()));
    }
    if (static_cast<std::size_t>(particles_.cols()) != model_.dim()) {
      throw DimensionMismatch("ALR particle dimension does not match the model");
    }
    if (settings_.pool_cap < 1 || settings_.inner_cycles < 1) {
      throw std::invalid_argument("ALR pool cap and inner cycles must be positive");
    }
    validate_inner_kind(model_, settings_.inner);
    model_.validate(data_);
    check_dimension(model_.dim(), theta_, "initial theta");
    if (!prior_.in_support(theta_)) {
      throw std::invalid_argument("initial theta lies outside the prior support");
    }
    s_data_ = model_.suffstats(data_);
    tree_ = nearest_particle_tree(particles_);
    const auto d = static_cast<std::size_t>(particles_.rows());
    chains_.assign(d, data_);
    pools_.assign(d, {});
    generated_.assign(d, 0);
    edge_lse_.assign(d, kNegInf);
    log_c_.assign(d, 0.0);
    children_.assign(d, {});
    for (std::size_t j = 0; j < d; ++j) {
      if (tree_.parent[j] >= 0) {
        children_[static_cast<std::size_t>(tree_.parent[j])].push_back(static_cast<int>(j));
      }
    }
  }

  std::string label() const override { return "alr"; }
  std::size_t param_dim() const override { return model_.dim(); }

  bool step(std::size_t iteration, RngStream& rng) override {
    grow_pools(rng);
    refresh_particle_estimates();
    Vector candidate = proposal_.propose(theta_, rng);
    bool accepted = false;
    if (prior_.in_support(candidate)) {
      const double log_ratio = prior_.log_density(candidate) - prior_.log_density(theta_) +
                               (candidate - theta_).dot(s_data_) -
                               (estimate(candidate, true) - estimate(theta_));
      if (metropolis_accept(log_ratio, rng)) {
        theta_ = std::move(candidate);
        accepted = true;
      }
    }
    proposal_.record(iteration, theta_, accepted);
    return accepted;
  }

  void current_row(std::span<double> row) const override {
    std::copy(theta_.data(), theta_.data() + theta_.size(), row.begin());
  }

  nlohmann::json tuning() const override {
    return {{"d", particles_.rows()},
            {"inner", std::string(to_string(settings_.inner))},
            {"inner_cycles", settings_.inner_cycles},
            {"pool_cap", settings_.pool_cap},
            {"prior", prior_.to_json()}};
  }

  nlohmann::json diagnostics() const override {
    return {{"far_proposals", far_proposals_}, {"longest_tree_edge", tree_.longest_edge}};
  }

  /// Running estimate of log c(theta) - log c(root particle).
  double log_normalizer_estimate(const Vector& theta) const { return estimate(theta); }

  /// Runs one round of inner updates and refreshes particle estimates
  /// without moving theta.
  void warm_up(RngStream& rng) {
    grow_pools(rng);
    refresh_particle_estimates();
  }

  std::size_t far_proposals() const { return far_proposals_; }
  const ParticleTree& tree() const { return tree_; }
  const std::vector<double>& particle_log_normalizers() const { return log_c_; }

  nlohmann::json save_state() const override {
    nlohmann::json j;
    j["theta"] = to_std(theta_);
    j["proposal"] = proposal_.save_state();
    j["generated"] = generated_;
    // Edges without draws hold -inf, which JSON cannot carry; store null.
    nlohmann::json edges = nlohmann::json::array();
    for (double e : edge_lse_) edges.push_back(std::isfinite(e) ? nlohmann::json(e) : nlohmann::json(nullptr));
    j["edge_lse"] = std::move(edges);
    j["far"] = far_proposals_;
    j["pools"] = pools_;
    nlohmann::json chains = nlohmann::json::array();
    for (const auto& c : chains_) chains.push_back(state_to_json(c));
    j["chains"] = std::move(chains);
    return j;
  }

  void load_state(const nlohmann::json& j) override {
    theta_ = to_vector(j.at("theta").get<std::vector<double>>());
    proposal_.load_state(j.at("proposal"));
    generated_ = j.at("generated").get<std::vector<std::size_t>>();
    const auto& edges = j.at("edge_lse");
    for (std::size_t k = 0; k < edge_lse_.size(); ++k) {
      edge_lse_[k] = edges.at(k).is_null() ? kNegInf : edges.at(k).get<double>();
    }
    far_proposals_ = j.at("far").get<std::size_t>();
    pools_ = j.at("pools").get<std::vector<std::vector<double>>>();
    const auto& chains = j.at("chains");
    for (std::size_t k = 0; k < chains_.size(); ++k) state_from_json(chains.at(k), chains_[k]);
    refresh_particle_estimates();
  }

 private:
  void grow_pools(RngStream& rng) {
    const auto p = model_.dim();
    for (std::size_t j = 0; j < chains_.size(); ++j) {
      const Vector theta_j = particles_.row(static_cast<Eigen::Index>(j)).transpose();
      run_cycles(model_, chains_[j], theta_j, settings_.inner, settings_.inner_cycles, rng);
      const Vector s = model_.suffstats(chains_[j]);
      ++generated_[j];
      auto& pool = pools_[j];
      if (pool.size() < settings_.pool_cap * p) {
        pool.insert(pool.end(), s.data(), s.data() + p);
      } else {
        const std::size_t slot = rng.uniform_index(generated_[j]);
        if (slot < settings_.pool_cap) {
          std::copy(s.data(), s.data() + p, pool.begin() + static_cast<std::ptrdiff_t>(slot * p));
        }
      }
      for (int child : children_[j]) {
        const auto c = static_cast<Eigen::Index>(child);
        const double lw = (particles_.row(c).transpose() - theta_j).dot(s);
        double& acc = edge_lse_[static_cast<std::size_t>(child)];
        acc = acc == kNegInf ? lw : std::max(acc, lw) + std::log1p(std::exp(-std::abs(acc - lw)));
      }
    }
  }

  void refresh_particle_estimates() {
    for (int j : tree_.order) {
      const auto jj = static_cast<std::size_t>(j);
      const int parent = tree_.parent[jj];
      if (parent < 0) {
        log_c_[jj] = 0.0;
        continue;
      }
      const auto pp = static_cast<std::size_t>(parent);
      log_c_[jj] = log_c_[pp] + edge_lse_[jj] - std::log(static_cast<double>(generated_[pp]));
    }
  }

  double estimate(const Vector& theta, bool count_far = false) const {
    double distance = 0.0;
    const std::size_t k = nearest_particle(particles_, theta, &distance);
    if (count_far && distance > std::max(tree_.longest_edge, 1e-12)) {
      ++far_proposals_;
    }
    const auto p = model_.dim();
    const auto& pool = pools_[k];
    const std::size_t n = pool.size() / p;
    if (n == 0) {
      return log_c_[k];
    }
    const Vector delta = theta - particles_.row(static_cast<Eigen::Index>(k)).transpose();
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> stats(
        pool.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    const Eigen::ArrayXd lw = (stats * delta).array();
    const double top = lw.maxCoeff();
    return log_c_[k] + top + std::log((lw - top).exp().sum()) - std::log(static_cast<double>(n));
  }

  Model model_;
  State data_;
  Prior prior_;
  RandomWalkProposal proposal_;
  Matrix particles_;
  AlrSettings settings_;
  Vector theta_;
  Vector s_data_;
  ParticleTree tree_;
  std::vector<State> chains_;
  std::vector<std::vector<double>> pools_;
  std::vector<std::size_t> generated_;
  std::vector<double> edge_lse_;
  std::vector<double> log_c_;
  std::vector<std::vector<int>> children_;
  mutable std::size_t far_proposals_ = 0;
};

}  // namespace dimc

#endif  // DIMC_SAMPLERS_HPP
