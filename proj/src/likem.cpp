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

#include "dimc/likem.hpp"

#include <fstream>

namespace dimc {

nlohmann::json EmulatorSnapshot::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < particles.rows(); ++i) rows.push_back(to_std(particles.row(i).transpose()));
  return {{"particles", rows}, {"values", to_std(values)}, {"noise", to_std(noise)}, {"gp", gp.to_json()},
          {"info", info}};
}

EmulatorSnapshot EmulatorSnapshot::from_json(const nlohmann::json& j) {
  GpSurrogate gp = GpSurrogate::from_json(j.at("gp"));
  Matrix particles = gp.inputs();
  return EmulatorSnapshot{std::move(particles), to_vector(j.at("values").get<std::vector<double>>()),
                          to_vector(j.at("noise").get<std::vector<double>>()), std::move(gp),
                          j.value("info", nlohmann::json::object())};
}

void write_emulator_snapshot(const std::filesystem::path& path, const EmulatorSnapshot& snapshot) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write emulator snapshot " + path.string());
  }
  out << snapshot.to_json().dump(2) << '\n';
}

EmulatorSnapshot read_emulator_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read emulator snapshot " + path.string());
  }
  return EmulatorSnapshot::from_json(nlohmann::json::parse(in));
}

SurrogateSampler::SurrogateSampler(GpSurrogate gp, Prior prior, RandomWalkProposal proposal, Vector init,
                                   nlohmann::json info)
    : gp_(std::move(gp)),
      prior_(std::move(prior)),
      proposal_(std::move(proposal)),
      theta_(std::move(init)),
      info_(std::move(info)) {
  if (theta_.size() != gp_.inputs().cols() || proposal_.dim() != static_cast<std::size_t>(theta_.size())) {
    throw DimensionMismatch("surrogate sampler: dimensions of the emulator, proposal and init disagree");
  }
  if (!prior_.in_support(theta_)) {
    throw std::invalid_argument("initial theta lies outside the prior support");
  }
  log_target_ = prior_.log_density(theta_) + gp_.predict_mean(theta_);
}

bool SurrogateSampler::step(std::size_t iteration, RngStream& rng) {
  Vector candidate = proposal_.propose(theta_, rng);
  bool accepted = false;
  if (prior_.in_support(candidate)) {
    const double target = prior_.log_density(candidate) + gp_.predict_mean(candidate);
    if (metropolis_accept(target - log_target_, rng)) {
      theta_ = std::move(candidate);
      log_target_ = target;
      accepted = true;
    }
  }
  proposal_.record(iteration, theta_, accepted);
  return accepted;
}

void SurrogateSampler::current_row(std::span<double> row) const {
  std::copy(theta_.data(), theta_.data() + theta_.size(), row.begin());
}

nlohmann::json SurrogateSampler::tuning() const {
  return {{"d", gp_.inputs().rows()}, {"prior", prior_.to_json()}};
}

nlohmann::json SurrogateSampler::save_state() const {
  return {{"theta", to_std(theta_)}, {"proposal", proposal_.save_state()}};
}

void SurrogateSampler::load_state(const nlohmann::json& j) {
  theta_ = to_vector(j.at("theta").get<std::vector<double>>());
  proposal_.load_state(j.at("proposal"));
  log_target_ = prior_.log_density(theta_) + gp_.predict_mean(theta_);
}

}  // namespace dimc
