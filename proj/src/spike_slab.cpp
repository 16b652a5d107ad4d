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

#include "dimc/spike_slab.hpp"

#include "dimc/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dimc {
namespace {

double log_normal0(double x, double var) { return -0.5 * (std::log(2.0 * std::numbers::pi * var) + x * x / var); }

bool accept(double log_ratio, RngStream& rng) {
  return log_ratio >= 0.0 || std::log(rng.uniform_open()) < log_ratio;
}

// Reflects x into [lo, hi].
double reflect(double x, double lo, double hi) {
  const double width = hi - lo;
  double y = std::fmod(x - lo, 2.0 * width);
  if (y < 0.0) y += 2.0 * width;
  return y <= width ? lo + y : hi - (y - width);
}

}  // namespace

double spike_slab_log_conditional(const Vector& theta, const std::vector<int>& lambda, double sigma2, double omega) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double var = lambda[static_cast<std::size_t>(i)] ? omega * omega * sigma2 : sigma2;
    out += log_normal0(theta(i), var);
  }
  return out;
}

double inclusion_probability(double theta_i, double sigma2, double omega) {
  const double slab = log_normal0(theta_i, omega * omega * sigma2);
  const double spike = log_normal0(theta_i, sigma2);
  return 1.0 / (1.0 + std::exp(spike - slab));
}

SpikeSlabState spike_slab_initial_state(std::size_t dim, const SpikeSlabHyper& hyper) {
  SpikeSlabState s;
  s.theta = Vector::Zero(static_cast<Eigen::Index>(dim));
  s.lambda.assign(dim, 0);
  s.sigma2 = 2.0 / (hyper.tau_lower + hyper.tau_upper);
  s.omega = 1.0 + hyper.y_shape / hyper.y_rate;
  return s;
}

SpikeSlabSampler::SpikeSlabSampler(IsingNetworkModel model, ItemResponseMatrix data, SpikeSlabSettings settings,
                                   SpikeSlabState init)
    : model_(std::move(model)),
      data_(std::move(data)),
      settings_(std::move(settings)),
      proposal_(Matrix::Identity(1, 1)),
      state_(std::move(init)) {
  model_.validate(data_);
  s_data_ = model_.suffstats(data_);
  const auto p = model_.dim();
  check_dimension(p, state_.theta, "spike-and-slab initial theta");
  if (state_.lambda.size() != p) {
    throw DimensionMismatch("spike-and-slab indicators must have one entry per parameter");
  }
  const auto& h = settings_.hyper;
  if (!(h.tau_lower > 0.0 && h.tau_upper > h.tau_lower && h.y_shape > 0.0 && h.y_rate > 0.0)) {
    throw std::invalid_argument("invalid spike-and-slab hyperparameters");
  }
  const double tau = 1.0 / state_.sigma2;
  if (!(tau > h.tau_lower && tau < h.tau_upper) || !(state_.omega > 1.0)) {
    throw std::invalid_argument("spike-and-slab initial state violates 1/sigma^2 bounds or omega > 1");
  }
  if (settings_.m < 1) {
    throw std::invalid_argument("spike-and-slab inner length m must be at least 1");
  }
  if (settings_.theta_scales.size() == 0) {
    settings_.theta_scales = Vector::Constant(static_cast<Eigen::Index>(p), 0.1);
  }
  check_dimension(p, settings_.theta_scales, "spike-and-slab proposal scales");
  proposal_ = RandomWalkProposal::diagonal(settings_.theta_scales, settings_.adapt_until);
}

std::vector<std::string> SpikeSlabSampler::columns() const {
  const auto p = model_.dim();
  std::vector<std::string> out = theta_columns(p);
  for (std::size_t i = 1; i <= p; ++i) out.push_back("lambda_" + std::to_string(i));
  out.emplace_back("sigma2");
  out.emplace_back("omega");
  return out;
}

bool SpikeSlabSampler::update_theta(RngStream& rng) {
  const Vector& theta = state_.theta;
  Vector candidate = proposal_.propose(theta, rng);
  double log_ratio = spike_slab_log_conditional(candidate, state_.lambda, state_.sigma2, state_.omega) -
                     spike_slab_log_conditional(theta, state_.lambda, state_.sigma2, state_.omega);
  if (settings_.use_likelihood) {
    ItemResponseMatrix aux = data_;
    run_cycles(model_, aux, candidate, InnerKind::GibbsSweep, settings_.m, rng);
    log_ratio += (candidate - theta).dot(s_data_) + (theta - candidate).dot(model_.suffstats(aux));
  }
  if (accept(log_ratio, rng)) {
    state_.theta = std::move(candidate);
    return true;
  }
  return false;
}

void SpikeSlabSampler::update_lambda(RngStream& rng) {
  for (Eigen::Index i = 0; i < state_.theta.size(); ++i) {
    state_.lambda[static_cast<std::size_t>(i)] =
        rng.bernoulli(inclusion_probability(state_.theta(i), state_.sigma2, state_.omega)) ? 1 : 0;
  }
}

// Target in u = log tau: tau^(P/2 + 1) exp(-tau * sum theta_i^2 / (2 c_i)),
// c_i = omega^2 for included coordinates and 1 otherwise.
void SpikeSlabSampler::update_tau(RngStream& rng) {
  const auto& h = settings_.hyper;
  double q = 0.0;
  for (Eigen::Index i = 0; i < state_.theta.size(); ++i) {
    const double c = state_.lambda[static_cast<std::size_t>(i)] ? state_.omega * state_.omega : 1.0;
    q += state_.theta(i) * state_.theta(i) / (2.0 * c);
  }
  const double half_p = 0.5 * static_cast<double>(state_.theta.size());
  const double u = -std::log(state_.sigma2);
  const double u_new =
      reflect(u + settings_.log_tau_step * rng.normal(), std::log(h.tau_lower), std::log(h.tau_upper));
  const double tau = std::exp(u);
  const double tau_new = std::exp(u_new);
  if (accept((half_p + 1.0) * (u_new - u) - (tau_new - tau) * q, rng)) {
    state_.sigma2 = 1.0 / tau_new;
    ++tau_accepted_;
  }
}

// Target in v = log(omega - 1): Gamma density of Y times the Jacobian Y,
// times the slab densities of the included coordinates.
void SpikeSlabSampler::update_omega(RngStream& rng) {
  const auto& h = settings_.hyper;
  auto log_target = [&](double v) {
    const double y = std::exp(v);
    const double omega = 1.0 + y;
    double out = h.y_shape * v - h.y_rate * y;
    for (Eigen::Index i = 0; i < state_.theta.size(); ++i) {
      if (state_.lambda[static_cast<std::size_t>(i)]) {
        out += -std::log(omega) - state_.theta(i) * state_.theta(i) / (2.0 * omega * omega * state_.sigma2);
      }
    }
    return out;
  };
  const double v = std::log(state_.omega - 1.0);
  const double v_new = v + settings_.log_y_step * rng.normal();
  if (accept(log_target(v_new) - log_target(v), rng)) {
    state_.omega = 1.0 + std::exp(v_new);
    ++omega_accepted_;
  }
}

bool SpikeSlabSampler::step(std::size_t iteration, RngStream& rng) {
  const bool accepted = update_theta(rng);
  proposal_.record(iteration, state_.theta, accepted);
  update_lambda(rng);
  update_tau(rng);
  update_omega(rng);
  ++steps_;
  return accepted;
}

void SpikeSlabSampler::current_row(std::span<double> row) const {
  const auto p = static_cast<std::size_t>(state_.theta.size());
  for (std::size_t i = 0; i < p; ++i) {
    row[i] = state_.theta(static_cast<Eigen::Index>(i));
    row[p + i] = state_.lambda[i];
  }
  row[2 * p] = state_.sigma2;
  row[2 * p + 1] = state_.omega;
}

nlohmann::json SpikeSlabSampler::tuning() const {
  const auto& h = settings_.hyper;
  return {{"m", settings_.m},
          {"use_likelihood", settings_.use_likelihood},
          {"tau_bounds", {h.tau_lower, h.tau_upper}},
          {"y_gamma_shape", h.y_shape},
          {"y_gamma_rate", h.y_rate},
          {"log_tau_step", settings_.log_tau_step},
          {"log_y_step", settings_.log_y_step}};
}

nlohmann::json SpikeSlabSampler::diagnostics() const {
  const double n = steps_ > 0 ? static_cast<double>(steps_) : 1.0;
  return {{"tau_acceptance", static_cast<double>(tau_accepted_) / n},
          {"omega_acceptance", static_cast<double>(omega_accepted_) / n}};
}

nlohmann::json SpikeSlabSampler::save_state() const {
  return {{"theta", to_std(state_.theta)},   {"lambda", state_.lambda},      {"sigma2", state_.sigma2},
          {"omega", state_.omega},           {"proposal", proposal_.save_state()},
          {"tau_accepted", tau_accepted_},   {"omega_accepted", omega_accepted_}, {"steps", steps_}};
}

void SpikeSlabSampler::load_state(const nlohmann::json& j) {
  state_.theta = to_vector(j.at("theta").get<std::vector<double>>());
  state_.lambda = j.at("lambda").get<std::vector<int>>();
  state_.sigma2 = j.at("sigma2").get<double>();
  state_.omega = j.at("omega").get<double>();
  proposal_.load_state(j.at("proposal"));
  tau_accepted_ = j.at("tau_accepted").get<std::size_t>();
  omega_accepted_ = j.at("omega_accepted").get<std::size_t>();
  steps_ = j.at("steps").get<std::size_t>();
}

}  // namespace dimc
