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

#include "dimc/proposal.hpp"

#include "dimc/errors.hpp"

#include <cmath>

namespace dimc {

RandomWalkProposal::RandomWalkProposal(Matrix covariance, std::size_t adapt_until, std::size_t adapt_interval)
    : initial_(covariance), adapt_until_(adapt_until), adapt_interval_(std::max<std::size_t>(adapt_interval, 10)) {
  if (covariance.rows() != covariance.cols() || covariance.rows() == 0) {
    throw DimensionMismatch("RandomWalkProposal: covariance must be square and non-empty");
  }
  set_covariance(covariance);
  mean_ = Vector::Zero(covariance.rows());
  m2_ = Matrix::Zero(covariance.rows(), covariance.rows());
}

RandomWalkProposal RandomWalkProposal::diagonal(const Vector& scales, std::size_t adapt_until,
                                                std::size_t adapt_interval) {
  return RandomWalkProposal(Matrix(scales.array().square().matrix().asDiagonal()), adapt_until, adapt_interval);
}

void RandomWalkProposal::set_covariance(const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("RandomWalkProposal: covariance is not positive definite");
  }
  covariance_ = cov;
  chol_ = llt.matrixL();
}

Vector RandomWalkProposal::propose(const Vector& current, RngStream& rng) const {
  Vector z(current.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z(i) = rng.normal();
  }
  return current + chol_ * z;
}

void RandomWalkProposal::record(std::size_t iteration, const Vector& state, bool accepted) {
  if (iteration >= adapt_until_) {
    return;
  }
  ++seen_;
  const Vector delta = state - mean_;
  mean_ += delta / static_cast<double>(seen_);
  m2_ += delta * (state - mean_).transpose();
  window_accepted_ += accepted ? 1 : 0;
  ++window_size_;
  if (window_size_ == adapt_interval_) {
    adapt();
  }
}

void RandomWalkProposal::adapt() {
  const double rate = static_cast<double>(window_accepted_) / static_cast<double>(window_size_);
  if (rate < 0.15) {
    log_scale_ -= 0.4;
  } else if (rate > 0.5) {
    log_scale_ += 0.4;
  }
  window_accepted_ = 0;
  window_size_ = 0;

  const auto p = static_cast<double>(dim());
  Matrix base = initial_;
  if (seen_ > 10 * dim() + 10) {
    Matrix empirical = m2_ / static_cast<double>(seen_ - 1);
    const double floor = 1e-10 * std::max(1.0, empirical.diagonal().maxCoeff());
    empirical.diagonal().array() += floor;
    if ((empirical.diagonal().array() > 10.0 * floor).all()) {
      base = (2.38 * 2.38 / p) * empirical;
    }
  }
  const Matrix candidate = std::exp(2.0 * log_scale_) * base;
  Eigen::LLT<Matrix> llt(candidate);
  if (llt.info() == Eigen::Success) {
    covariance_ = candidate;
    chol_ = llt.matrixL();
  }
}

nlohmann::json RandomWalkProposal::save_state() const {
  nlohmann::json j;
  j["covariance"] = std::vector<double>(covariance_.data(), covariance_.data() + covariance_.size());
  j["log_scale"] = log_scale_;
  j["seen"] = seen_;
  j["mean"] = to_std(mean_);
  j["m2"] = std::vector<double>(m2_.data(), m2_.data() + m2_.size());
  j["window_accepted"] = window_accepted_;
  j["window_size"] = window_size_;
  return j;
}

void RandomWalkProposal::load_state(const nlohmann::json& j) {
  const auto p = covariance_.rows();
  const auto cov = j.at("covariance").get<std::vector<double>>();
  const auto m2 = j.at("m2").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(cov.size()) != p * p || static_cast<Eigen::Index>(m2.size()) != p * p) {
    throw DimensionMismatch("RandomWalkProposal: checkpoint has the wrong dimension");
  }
  set_covariance(Eigen::Map<const Matrix>(cov.data(), p, p));
  m2_ = Eigen::Map<const Matrix>(m2.data(), p, p);
  mean_ = to_vector(j.at("mean").get<std::vector<double>>());
  log_scale_ = j.at("log_scale").get<double>();
  seen_ = j.at("seen").get<std::size_t>();
  window_accepted_ = j.at("window_accepted").get<std::size_t>();
  window_size_ = j.at("window_size").get<std::size_t>();
}

}  // namespace dimc
