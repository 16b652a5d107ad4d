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

#include "dimc/inner.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <vector>

namespace dimc {
namespace {

double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0U); }

  std::uint32_t find(std::uint32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      // Smaller index wins so roots are visited before their members.
      if (a < b) {
        parent_[b] = a;
      } else {
        parent_[a] = b;
      }
    }
  }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

std::string_view to_string(InnerKind kind) {
  switch (kind) {
    case InnerKind::GibbsSweep:
      return "gibbs";
    case InnerKind::SwendsenWang:
      return "swendsen_wang";
    case InnerKind::EdgeToggle:
      return "edge_toggle";
  }
  return "unknown";
}

InnerKind parse_inner_kind(std::string_view text) {
  if (text == "gibbs") return InnerKind::GibbsSweep;
  if (text == "swendsen_wang") return InnerKind::SwendsenWang;
  if (text == "edge_toggle") return InnerKind::EdgeToggle;
  throw std::invalid_argument("unknown inner sampler '" + std::string(text) +
                              "' (expected gibbs, swendsen_wang or edge_toggle)");
}

void gibbs_cycle(const PottsModel& model, PottsLattice& x, const Vector& theta, RngStream& rng) {
  check_dimension(1, theta, "gibbs_cycle theta");
  const int rows = model.rows();
  const int cols = model.cols();
  const int k = model.colors();
  // exp(theta * matches) for 0..4 matching neighbors
  std::array<double, 5> factor{};
  for (int m = 0; m < 5; ++m) {
    factor[static_cast<std::size_t>(m)] = std::exp(theta(0) * m);
  }
  std::vector<int> matches(static_cast<std::size_t>(k));
  std::vector<double> weight(static_cast<std::size_t>(k));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      std::fill(matches.begin(), matches.end(), 0);
      if (r > 0) ++matches[static_cast<std::size_t>(x(r - 1, c) - 1)];
      if (r + 1 < rows) ++matches[static_cast<std::size_t>(x(r + 1, c) - 1)];
      if (c > 0) ++matches[static_cast<std::size_t>(x(r, c - 1) - 1)];
      if (c + 1 < cols) ++matches[static_cast<std::size_t>(x(r, c + 1) - 1)];
      double total = 0.0;
      for (std::size_t q = 0; q < weight.size(); ++q) {
        weight[q] = factor[static_cast<std::size_t>(matches[q])];
        total += weight[q];
      }
      double u = rng.uniform() * total;
      int color = k;
      for (int q = 0; q + 1 < k; ++q) {
        u -= weight[static_cast<std::size_t>(q)];
        if (u < 0.0) {
          color = q + 1;
          break;
        }
      }
      x.set(static_cast<std::size_t>(r * cols + c), color);
    }
  }
}

void gibbs_cycle(const ErgmModel& model, UndirectedGraph& x, const Vector& theta, RngStream& rng) {
  check_dimension(2, theta, "gibbs_cycle theta");
  const int n = model.nodes();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      x.set_edge(i, j, false);
      const auto [de, dg] = model.add_edge_change(x, i, j);
      const double eta = theta(0) * de + theta(1) * dg;
      if (rng.uniform() < logistic(eta)) {
        x.set_edge(i, j, true);
      }
    }
  }
}

void edge_toggle_cycle(const ErgmModel& model, UndirectedGraph& x, const Vector& theta, RngStream& rng) {
  check_dimension(2, theta, "edge_toggle_cycle theta");
  const int n = model.nodes();
  const std::size_t dyads = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  for (std::size_t t = 0; t < dyads; ++t) {
    int i = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
    int j = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n - 1)));
    if (j >= i) {
      ++j;
    }
    const bool present = x.has_edge(i, j);
    x.set_edge(i, j, false);
    const auto [de, dg] = model.add_edge_change(x, i, j);
    const double eta = theta(0) * de + theta(1) * dg;
    const double log_accept = present ? -eta : eta;
    const bool toggle = log_accept >= 0.0 || std::log(rng.uniform_open()) < log_accept;
    x.set_edge(i, j, toggle ? !present : present);
  }
}

void gibbs_cycle(const IsingNetworkModel& model, ItemResponseMatrix& x, const Vector& theta, RngStream& rng) {
  check_dimension(model.dim(), theta, "gibbs_cycle theta");
  const int p = model.items();
  Matrix gamma = Matrix::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    for (int k = j + 1; k < p; ++k) {
      const double g = theta(static_cast<Eigen::Index>(isingnet_pair_index(p, j, k)));
      gamma(j, k) = g;
      gamma(k, j) = g;
    }
  }
  for (int i = 0; i < model.respondents(); ++i) {
    for (int j = 0; j < p; ++j) {
      double eta = theta(j);
      for (int k = 0; k < p; ++k) {
        if (k != j && x(i, k) != 0) {
          eta += gamma(j, k);
        }
      }
      x.set(i, j, rng.uniform() < logistic(eta) ? 1 : 0);
    }
  }
}

void swendsen_wang_cycle(PottsLattice& x, double theta, RngStream& rng) {
  if (!(theta >= 0.0)) {
    throw std::domain_error("swendsen_wang_cycle: theta must be non-negative, got " + std::to_string(theta));
  }
  const int rows = x.rows();
  const int cols = x.cols();
  const double bond = 1.0 - std::exp(-theta);
  UnionFind clusters(x.size());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const auto cell = static_cast<std::uint32_t>(r * cols + c);
      const int v = x(r, c);
      if (c + 1 < cols && x(r, c + 1) == v && rng.uniform() < bond) {
        clusters.unite(cell, cell + 1);
      }
      if (r + 1 < rows && x(r + 1, c) == v && rng.uniform() < bond) {
        clusters.unite(cell, cell + static_cast<std::uint32_t>(cols));
      }
    }
  }
  // Roots carry the smallest index of their cluster, so a single forward
  // pass assigns each root its new color before any member reads it.
  const auto k = static_cast<std::size_t>(x.colors());
  for (std::size_t cell = 0; cell < x.size(); ++cell) {
    const auto root = clusters.find(static_cast<std::uint32_t>(cell));
    if (root == cell) {
      x.set(cell, static_cast<int>(rng.uniform_index(k)) + 1);
    } else {
      x.set(cell, x.at(root));
    }
  }
}

}  // namespace dimc
