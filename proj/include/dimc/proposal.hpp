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

#ifndef DIMC_PROPOSAL_HPP
#define DIMC_PROPOSAL_HPP

#include "dimc/linalg.hpp"
#include "dimc/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>

namespace dimc {

/// Gaussian random-walk proposal whose covariance adapts during burn-in only.
/**
 * While iteration < adapt_until the proposal tracks the empirical
 * covariance of the visited states (scaled by 2.38^2/p) and a scalar step
 * multiplier nudged toward a moderate acceptance rate. From adapt_until on
 * the covariance is frozen, so the post-burn-in chain is time-homogeneous.
 */
class RandomWalkProposal {
 public:
  explicit RandomWalkProposal(Matrix covariance, std::size_t adapt_until = 0,
                              std::size_t adapt_interval = 200);

  static RandomWalkProposal diagonal(const Vector& scales, std::size_t adapt_until = 0,
                                     std::size_t adapt_interval = 200);

  std::size_t dim() const { return static_cast<std::size_t>(covariance_.rows()); }
  const Matrix& covariance() const { return covariance_; }
  std::size_t adapt_until() const { return adapt_until_; }

  Vector propose(const Vector& current, RngStream& rng) const;

  /// Feeds the state held after \p iteration; ignored once frozen.
  void record(std::size_t iteration, const Vector& state, bool accepted);

  nlohmann::json save_state() const;
  void load_state(const nlohmann::json& j);

 private:
  void set_covariance(const Matrix& cov);
  void adapt();

  Matrix covariance_;
  Matrix chol_;
  Matrix initial_;
  std::size_t adapt_until_;
  std::size_t adapt_interval_;
  double log_scale_ = 0.0;
  std::size_t seen_ = 0;
  Vector mean_;
  Matrix m2_;
  std::size_t window_accepted_ = 0;
  std::size_t window_size_ = 0;
};

}  // namespace dimc

#endif  // DIMC_PROPOSAL_HPP
