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

#ifndef DIMC_EMULATION_HPP
#define DIMC_EMULATION_HPP

#include "dimc/errors.hpp"
#include "dimc/linalg.hpp"
#include "dimc/models.hpp"
#include "dimc/rng.hpp"
#include "dimc/snis.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace dimc {

/// Minimum spanning tree over particles, rooted at the particle nearest the
/// centroid. Telescoped normalizing-function estimates follow tree edges, so
/// every hop joins nearby particles.
struct ParticleTree {
  int root = 0;
  std::vector<int> parent;  ///< -1 for the root
  std::vector<int> order;   ///< parents precede children
  double longest_edge = 0.0;
};

ParticleTree nearest_particle_tree(const Matrix& particles);

/// Index of the particle closest to \p theta (Euclidean).
std::size_t nearest_particle(const Matrix& particles, const Vector& theta, double* distance = nullptr);

/// \p d well-spread rows of \p samples, greedily maximizing the distance to
/// the rows already chosen, starting from the row closest to the mean.
Matrix farthest_point_thinning(const Matrix& samples, std::size_t d);

struct LoglikEstimates {
  /// theta' S(x) - log c(theta), up to one shared additive constant.
  Vector values;
  /// Delta-method variance of each value.
  Vector noise;
  /// log c(theta_j) - log c(root).
  Vector log_normalizer;
  ParticleTree tree;
  double min_ess = 0.0;
};

struct TelescopeOptions {
  std::size_t n = 10000;
  PoolOptions pool;
  double ess_floor = 50.0;
};

/// Telescopes log c between consecutive particles of \p path (indices into
/// \p particles), with a fresh pool at each hop source. Returns the
/// cumulative log c relative to the first particle and the accumulated
/// delta-method variances.
template <class Model>
std::pair<Vector, Vector> telescope_path(const Model& model, const Matrix& particles, const std::vector<int>& path,
                                         const TelescopeOptions& options, const typename Model::State& init,
                                         RngStream& rng) {
  const auto len = static_cast<Eigen::Index>(path.size());
  Vector log_c = Vector::Zero(len);
  Vector var = Vector::Zero(len);
  for (Eigen::Index k = 1; k < len; ++k) {
    const Vector src = particles.row(path[static_cast<std::size_t>(k - 1)]).transpose();
    const Vector dst = particles.row(path[static_cast<std::size_t>(k)]).transpose();
    RngStream hop = rng.split(static_cast<std::uint64_t>(k));
    const AuxStatPool pool = build_pool(model, src, options.n, options.pool, init, hop);
    const SnisRatio r = snis_log_ratio(pool, dst);
    log_c(k) = log_c(k - 1) + r.log_ratio;
    var(k) = var(k - 1) + log_ratio_variance(r, options.n);
  }
  return {log_c, var};
}

/// Log-likelihood estimates at every particle for data with statistics
/// \p s_data, telescoping SNIS ratios down the nearest-particle tree.
/// One pool of size options.n is simulated at each particle that has
/// children. Throws EssTooLow if any hop falls below options.ess_floor.
template <class Model>
LoglikEstimates estimate_loglik_at_particles(const Model& model, const Matrix& particles, const Vector& s_data,
                                             const TelescopeOptions& options, const typename Model::State& init,
                                             RngStream& rng) {
  const auto d = static_cast<std::size_t>(particles.rows());
  if (d < 1) {
    throw std::invalid_argument("estimate_loglik_at_particles: no particles");
  }
  check_dimension(model.dim(), s_data, "data statistics");
  if (static_cast<std::size_t>(particles.cols()) != model.dim()) {
    throw DimensionMismatch("particle dimension does not match the model");
  }
  LoglikEstimates out;
  out.tree = nearest_particle_tree(particles);
  out.log_normalizer = Vector::Zero(static_cast<Eigen::Index>(d));
  out.noise = Vector::Zero(static_cast<Eigen::Index>(d));
  out.min_ess = static_cast<double>(options.n);

  std::vector<std::vector<int>> children(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (out.tree.parent[j] >= 0) children[static_cast<std::size_t>(out.tree.parent[j])].push_back(static_cast<int>(j));
  }
  for (int src : out.tree.order) {
    const auto s = static_cast<std::size_t>(src);
    if (children[s].empty()) continue;
    const Vector theta_src = particles.row(src).transpose();
    RngStream hop = rng.split(s);
    const AuxStatPool pool = build_pool(model, theta_src, options.n, options.pool, init, hop);
    for (int child : children[s]) {
      const SnisRatio r = snis_log_ratio(pool, particles.row(child).transpose());
      if (r.ess < options.ess_floor) {
        throw EssTooLow("effective sample size " + std::to_string(r.ess) + " on the hop from particle " +
                        std::to_string(src) + " to particle " + std::to_string(child) + " is below the floor " +
                        std::to_string(options.ess_floor) + "; use more particles or a larger N");
      }
      out.min_ess = std::min(out.min_ess, r.ess);
      out.log_normalizer(child) = out.log_normalizer(src) + r.log_ratio;
      out.noise(child) = out.noise(src) + log_ratio_variance(r, options.n);
    }
  }
  out.values = particles * s_data - out.log_normalizer;
  return out;
}

}  // namespace dimc

#endif  // DIMC_EMULATION_HPP
