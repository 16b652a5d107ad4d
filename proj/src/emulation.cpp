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

#include "dimc/emulation.hpp"

#include <limits>
#include <stdexcept>

namespace dimc {

ParticleTree nearest_particle_tree(const Matrix& particles) {
  const auto d = static_cast<std::size_t>(particles.rows());
  if (d == 0) {
    throw std::invalid_argument("nearest_particle_tree: no particles");
  }
  ParticleTree tree;
  const Vector centroid = particles.colwise().mean().transpose();
  tree.root = static_cast<int>(nearest_particle(particles, centroid));
  tree.parent.assign(d, -1);

  // Prim's algorithm on the complete Euclidean graph; O(d^2).
  std::vector<double> best(d, std::numeric_limits<double>::infinity());
  std::vector<int> via(d, -1);
  std::vector<char> in_tree(d, 0);
  std::size_t next = static_cast<std::size_t>(tree.root);
  best[next] = 0.0;
  for (std::size_t added = 0; added < d; ++added) {
    in_tree[next] = 1;
    tree.order.push_back(static_cast<int>(next));
    tree.parent[next] = via[next];
    if (via[next] >= 0) tree.longest_edge = std::max(tree.longest_edge, best[next]);
    const auto row = static_cast<Eigen::Index>(next);
    std::size_t candidate = d;
    for (std::size_t j = 0; j < d; ++j) {
      if (in_tree[j]) continue;
      const double dist = (particles.row(static_cast<Eigen::Index>(j)) - particles.row(row)).norm();
      if (dist < best[j]) {
        best[j] = dist;
        via[j] = static_cast<int>(next);
      }
      if (candidate == d || best[j] < best[candidate]) candidate = j;
    }
    next = candidate;
  }
  return tree;
}

std::size_t nearest_particle(const Matrix& particles, const Vector& theta, double* distance) {
  if (particles.rows() == 0) {
    throw std::invalid_argument("nearest_particle: no particles");
  }
  Eigen::Index best = 0;
  const double d2 = (particles.rowwise() - theta.transpose()).rowwise().squaredNorm().minCoeff(&best);
  if (distance) *distance = std::sqrt(d2);
  return static_cast<std::size_t>(best);
}

Matrix farthest_point_thinning(const Matrix& samples, std::size_t d) {
  const auto n = static_cast<std::size_t>(samples.rows());
  if (d < 1 || d > n) {
    throw std::invalid_argument("farthest_point_thinning: need 1 <= d <= " + std::to_string(n) + ", got " +
                                std::to_string(d));
  }
  Matrix out(static_cast<Eigen::Index>(d), samples.cols());
  const Vector mean = samples.colwise().mean().transpose();
  std::size_t pick = nearest_particle(samples, mean);
  Vector gap = Vector::Constant(static_cast<Eigen::Index>(n), std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < d; ++k) {
    const auto row = samples.row(static_cast<Eigen::Index>(pick));
    out.row(static_cast<Eigen::Index>(k)) = row;
    gap = gap.cwiseMin((samples.rowwise() - row).rowwise().squaredNorm());
    Eigen::Index far = 0;
    gap.maxCoeff(&far);
    pick = static_cast<std::size_t>(far);
  }
  return out;
}

}  // namespace dimc
