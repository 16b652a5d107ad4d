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

#ifndef DIMC_DIAGNOSTICS_HPP
#define DIMC_DIAGNOSTICS_HPP

#include "dimc/errors.hpp"
#include "dimc/linalg.hpp"
#include "dimc/models.hpp"
#include "dimc/prior.hpp"
#include "dimc/rng.hpp"
#include "dimc/snis.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

namespace dimc {

struct ScoreTerms {
  Vector u;  ///< posterior score
  Matrix h;  ///< posterior Hessian
};

/// Exponential-family score and Hessian given the model moments at theta:
/// u = S(x) - mean + grad log p,  H = -cov + hess log p.
ScoreTerms score_terms(const Vector& s_data, const Prior& prior, const Vector& theta, const Vector& mean,
                       const Matrix& cov);
/// Same with the moments estimated from \p pool by SNIS.
ScoreTerms score_terms(const Vector& s_data, const Prior& prior, const Vector& theta, const AuxStatPool& pool);

/// d(theta) = vech(u u' + H).
Vector curvature_vector(const ScoreTerms& terms);

/// One row d(theta_i) per row of \p thetas (n x r, r = p(p+1)/2).
/// Repeated consecutive rows, common in Metropolis output, are computed once.
Matrix curvature_series(const Matrix& thetas, const Vector& s_data, const Prior& prior, const AuxStatPool& pool,
                        double* min_ess = nullptr);

/// Same with several pools: row i uses pools[assignment[i]].
Matrix curvature_series(const Matrix& thetas, const Vector& s_data, const Prior& prior,
                        const std::vector<AuxStatPool>& pools, const std::vector<std::size_t>& assignment,
                        double* min_ess = nullptr);

/// Pool reference points for the diagnostic and the index of the
/// reference each sample row uses.
struct ReferenceSet {
  Matrix points;
  std::vector<std::size_t> assignment;
};

/// One reference: the sample mean. More: farthest-point thinning of the
/// sample in coordinates standardized by the sample sd, each row assigned
/// to its nearest reference in the same metric.
ReferenceSet acd_references(const Matrix& thetas, std::size_t count);

/// Batch-means estimate of the asymptotic covariance of sqrt(n) times the
/// series mean; b = 0 selects floor(sqrt(n)). Throws if n < 2b.
Matrix batch_means_cov(const Matrix& series, std::size_t b = 0);
/// Uncentered second moment (1/n) sum d d', for independent draws.
Matrix second_moment_cov(const Matrix& series);

/// 0.99 quantile of chi-square with r degrees of freedom.
double acd_threshold(std::size_t r);

struct AcdStatistic {
  double value = 0.0;
  bool pseudo_inverse = false;
};

/// n * dbar' V^-1 dbar. A numerically singular V falls back to its
/// pseudo-inverse.
AcdStatistic acd_statistic(const Matrix& series, bool iid, std::size_t batch = 0);

struct AcdOptions {
  std::size_t n_aux = 500;       ///< N, pool size per replication
  std::size_t replications = 30;  ///< R
  std::size_t dimension_cap = 400;
  bool iid = false;
  std::size_t batch = 0;
  std::size_t workers = 1;
  /// Pools per replication, each of n_aux draws. SNIS from a single pool
  /// at the mean degrades in the tails of wide posteriors.
  std::size_t references = 1;
  PoolOptions pool;
};

struct AcdReport {
  std::vector<double> statistics;
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::size_t n_aux = 0;
  std::size_t n = 0;
  std::size_t replications = 0;
  std::size_t r = 0;
  bool iid = false;
  std::size_t pseudo_inverse_count = 0;
  std::size_t references = 1;
  double min_ess = 0.0;
  Vector reference;

  nlohmann::json to_json() const;
};

/// Builds the report (mean, empirical 2.5/97.5 percentiles, pass flag) from
/// per-replication statistics.
AcdReport summarize_acd(std::vector<double> statistics, std::size_t r);

/// Percentile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> values, double q);

void check_acd_dimension(std::size_t p, std::size_t cap);

/// Approximate curvature diagnostic for the sample \p thetas (n x p).
/**
 * Each replication simulates fresh pools of options.n_aux statistics at
 * the reference points (by default just the sample mean) and evaluates
 * the statistic over the whole sample.
 * Replication k uses rng.split(k), so results do not depend on the worker
 * count.
 */
template <class Model>
AcdReport acd(const Matrix& thetas, const Model& model, const typename Model::State& data, const Prior& prior,
              const AcdOptions& options, const RngStream& rng) {
  const auto p = model.dim();
  check_acd_dimension(p, options.dimension_cap);
  if (thetas.rows() < 2) {
    throw std::invalid_argument("acd: the sample needs at least 2 draws");
  }
  if (static_cast<std::size_t>(thetas.cols()) != p) {
    throw DimensionMismatch("acd: sample dimension does not match the model");
  }
  if (options.replications < 1) {
    throw std::invalid_argument("acd: at least one replication is required");
  }
  if (options.references < 1) {
    throw std::invalid_argument("acd: at least one reference point is required");
  }
  const Vector s_data = model.suffstats(data);
  const Vector reference = thetas.colwise().mean().transpose();
  const ReferenceSet refs = acd_references(thetas, options.references);
  const std::size_t reps = options.replications;
  std::vector<double> stats(reps, 0.0);
  std::vector<double> ess(reps, 0.0);
  std::vector<char> pinv(reps, 0);
  std::vector<std::exception_ptr> errors(reps);

  auto work = [&](std::size_t k) {
    try {
      RngStream stream = rng.split(k);
      std::vector<AuxStatPool> pools;
      if (refs.points.rows() == 1) {
        pools.push_back(build_pool(model, reference, options.n_aux, options.pool, data, stream));
      } else {
        for (Eigen::Index j = 0; j < refs.points.rows(); ++j) {
          RngStream sub = stream.split(static_cast<std::uint64_t>(j));
          pools.push_back(
              build_pool(model, refs.points.row(j).transpose(), options.n_aux, options.pool, data, sub));
        }
      }
      const Matrix series = curvature_series(thetas, s_data, prior, pools, refs.assignment, &ess[k]);
      const AcdStatistic s = acd_statistic(series, options.iid, options.batch);
      stats[k] = s.value;
      pinv[k] = s.pseudo_inverse ? 1 : 0;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, reps);
  if (workers == 1) {
    for (std::size_t k = 0; k < reps; ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < reps; k += workers) work(k);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  AcdReport report = summarize_acd(std::move(stats), vech_size(p));
  report.n_aux = options.n_aux;
  report.n = static_cast<std::size_t>(thetas.rows());
  report.iid = options.iid;
  report.reference = reference;
  report.references = static_cast<std::size_t>(refs.points.rows());
  report.min_ess = *std::min_element(ess.begin(), ess.end());
  report.pseudo_inverse_count = static_cast<std::size_t>(std::count(pinv.begin(), pinv.end(), 1));
  return report;
}

}  // namespace dimc

#endif  // DIMC_DIAGNOSTICS_HPP
