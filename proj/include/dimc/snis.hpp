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

#ifndef DIMC_SNIS_HPP
#define DIMC_SNIS_HPP

#include "dimc/inner.hpp"
#include "dimc/linalg.hpp"
#include "dimc/models.hpp"
#include "dimc/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <stdexcept>

namespace dimc {

/// Sufficient statistics S(y_1..y_N) of draws from f(.|reference).
/**
 * Rows with identical statistics are also kept in compressed form
 * (distinct rows with counts); importance-sampling sums run over the
 * compressed rows, which is exact and makes lattice models with integer
 * statistics cheap to reweight.
 */
class AuxStatPool {
 public:
  AuxStatPool(Vector reference, Matrix stats, nlohmann::json generator = nlohmann::json::object());

  const Vector& reference() const { return reference_; }
  const Matrix& stats() const { return stats_; }
  std::size_t size() const { return static_cast<std::size_t>(stats_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(stats_.cols()); }
  const nlohmann::json& generator() const { return generator_; }

  const Matrix& distinct_stats() const { return distinct_; }
  const Vector& counts() const { return counts_; }
  const Vector& log_counts() const { return log_counts_; }

 private:
  Vector reference_;
  Matrix stats_;
  nlohmann::json generator_;
  Matrix distinct_;
  Vector counts_;
  Vector log_counts_;
};

struct SnisMoments {
  /// log(c(theta) / c(reference)) as log of the mean importance weight.
  double log_ratio = 0.0;
  Vector mean;
  Matrix cov;
  double ess = 0.0;
};

struct SnisRatio {
  double log_ratio = 0.0;
  double ess = 0.0;
};

/// Self-normalized importance sampling with weights exp((theta - ref)' S).
/// Throws SnisUnderflow when the weights are not representable.
SnisMoments snis_moments(const AuxStatPool& pool, const Vector& theta);
SnisRatio snis_log_ratio(const AuxStatPool& pool, const Vector& theta);

/// Delta-method variance of the log mean weight, 1/ESS - 1/N.
inline double log_ratio_variance(const SnisRatio& r, std::size_t n) {
  return std::max(0.0, 1.0 / r.ess - 1.0 / static_cast<double>(n));
}

struct PoolOptions {
  InnerKind inner = InnerKind::GibbsSweep;
  int burn_in = 100;
  /// Inner cycles between stored draws.
  int spacing = 1;
};

/// Burn-in, then N statistics \p options.spacing cycles apart, starting from \p init.
template <class Model>
AuxStatPool build_pool(const Model& model, const Vector& reference, std::size_t n, const PoolOptions& options,
                       typename Model::State init, RngStream& rng) {
  if (n < 1) {
    throw std::invalid_argument("build_pool: N must be at least 1");
  }
  if (options.spacing < 1 || options.burn_in < 0) {
    throw std::invalid_argument("build_pool: spacing must be >= 1 and burn-in >= 0");
  }
  model.validate(init);
  check_dimension(model.dim(), reference, "build_pool reference");
  run_cycles(model, init, reference, options.inner, options.burn_in, rng);
  Matrix stats(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(model.dim()));
  for (std::size_t l = 0; l < n; ++l) {
    run_cycles(model, init, reference, options.inner, options.spacing, rng);
    stats.row(static_cast<Eigen::Index>(l)) = model.suffstats(init).transpose();
  }
  nlohmann::json generator = {{"inner", std::string(to_string(options.inner))},
                              {"burn_in", options.burn_in},
                              {"spacing", options.spacing}};
  return AuxStatPool(reference, std::move(stats), std::move(generator));
}

}  // namespace dimc

#endif  // DIMC_SNIS_HPP
