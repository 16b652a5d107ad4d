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

#include "dimc/models.hpp"

#include <array>
#include <cmath>
#include <string>

namespace dimc {
namespace {

constexpr int kWeightTableSize = 4096;

const std::array<double, kWeightTableSize>& weight_table() {
  static const std::array<double, kWeightTableSize> table = [] {
    std::array<double, kWeightTableSize> t{};
    const double base = 1.0 - std::exp(-kGwespDecay);
    for (int k = 0; k < kWeightTableSize; ++k) {
      t[static_cast<std::size_t>(k)] = std::exp(kGwespDecay) * (1.0 - std::pow(base, k));
    }
    return t;
  }();
  return table;
}

int popcount_and(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  int count = 0;
  for (std::size_t w = 0; w < a.size(); ++w) {
    count += std::popcount(a[w] & b[w]);
  }
  return count;
}

std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exponent) {
  std::uint64_t result = 1;
  for (std::uint64_t e = 0; e < exponent; ++e) {
    if (result > (std::uint64_t{1} << 62) / base) {
      return std::nullopt;
    }
    result *= base;
  }
  return result;
}

void require(bool condition, const std::string& message) {
  if (!condition) {
    throw std::invalid_argument(message);
  }
}

}  // namespace

double gwesp_weight(int shared_partners) {
  if (shared_partners < kWeightTableSize) {
    return weight_table()[static_cast<std::size_t>(shared_partners)];
  }
  return std::exp(kGwespDecay) * (1.0 - std::pow(1.0 - std::exp(-kGwespDecay), shared_partners));
}

// --- PottsLattice ----------------------------------------------------------

PottsLattice::PottsLattice(int rows, int cols, int colors)
    : rows_(rows), cols_(cols), colors_(colors) {
  require(rows > 0 && cols > 0, "PottsLattice: dimensions must be positive");
  require(colors >= 1, "PottsLattice: need at least one color");
  cells_.assign(static_cast<std::size_t>(rows * cols), 1);
}

PottsLattice::PottsLattice(int rows, int cols, int colors, std::vector<int> cells)
    : rows_(rows), cols_(cols), colors_(colors), cells_(std::move(cells)) {
  require(rows > 0 && cols > 0, "PottsLattice: dimensions must be positive");
  require(colors >= 1, "PottsLattice: need at least one color");
  require(cells_.size() == static_cast<std::size_t>(rows * cols),
          "PottsLattice: expected " + std::to_string(rows * cols) + " cells, got " +
              std::to_string(cells_.size()));
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    require(cells_[i] >= 1 && cells_[i] <= colors,
            "PottsLattice: cell " + std::to_string(i) + " has color " + std::to_string(cells_[i]) +
                " outside 1.." + std::to_string(colors));
  }
}

std::size_t PottsLattice::edge_count() const {
  return static_cast<std::size_t>(2 * rows_ * cols_ - rows_ - cols_);
}

double potts_suffstat(const PottsLattice& x) {
  long count = 0;
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < x.cols(); ++c) {
      const int v = x(r, c);
      if (c + 1 < x.cols() && x(r, c + 1) == v) {
        ++count;
      }
      if (r + 1 < x.rows() && x(r + 1, c) == v) {
        ++count;
      }
    }
  }
  return static_cast<double>(count);
}

// --- UndirectedGraph -------------------------------------------------------

UndirectedGraph::UndirectedGraph(int nodes)
    : nodes_(nodes), words_(static_cast<std::size_t>((nodes + 63) / 64)) {
  require(nodes >= 1, "UndirectedGraph: need at least one node");
  bits_.assign(static_cast<std::size_t>(nodes) * words_, 0);
}

UndirectedGraph::UndirectedGraph(int nodes, std::span<const std::pair<int, int>> edges)
    : UndirectedGraph(nodes) {
  for (const auto& [i, j] : edges) {
    require(i >= 0 && i < nodes && j >= 0 && j < nodes,
            "UndirectedGraph: edge (" + std::to_string(i) + ", " + std::to_string(j) +
                ") references a node outside 0.." + std::to_string(nodes - 1));
    require(i != j, "UndirectedGraph: self-loop at node " + std::to_string(i));
    set_edge(i, j, true);
  }
}

void UndirectedGraph::set_edge(int i, int j, bool present) {
  const std::uint64_t bj = std::uint64_t{1} << (j % 64);
  const std::uint64_t bi = std::uint64_t{1} << (i % 64);
  auto& wij = bits_[row_offset(i) + static_cast<std::size_t>(j) / 64];
  auto& wji = bits_[row_offset(j) + static_cast<std::size_t>(i) / 64];
  if (present) {
    wij |= bj;
    wji |= bi;
  } else {
    wij &= ~bj;
    wji &= ~bi;
  }
}

int UndirectedGraph::degree(int i) const {
  int d = 0;
  for (auto w : row(i)) {
    d += std::popcount(w);
  }
  return d;
}

std::size_t UndirectedGraph::edge_count() const {
  std::size_t total = 0;
  for (auto w : bits_) {
    total += static_cast<std::size_t>(std::popcount(w));
  }
  return total / 2;
}

int UndirectedGraph::shared_partners(int i, int j) const { return popcount_and(row(i), row(j)); }

std::vector<std::pair<int, int>> UndirectedGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < nodes_; ++i) {
    for (int j = i + 1; j < nodes_; ++j) {
      if (has_edge(i, j)) {
        out.emplace_back(i, j);
      }
    }
  }
  return out;
}

Vector ergm_suffstats(const UndirectedGraph& g) {
  double edges = 0.0;
  double gwesp = 0.0;
  for (int i = 0; i < g.nodes(); ++i) {
    for (int j = i + 1; j < g.nodes(); ++j) {
      if (g.has_edge(i, j)) {
        edges += 1.0;
        gwesp += gwesp_weight(g.shared_partners(i, j));
      }
    }
  }
  Vector s(2);
  s << edges, gwesp;
  return s;
}

// --- ItemResponseMatrix ----------------------------------------------------

ItemResponseMatrix::ItemResponseMatrix(int respondents, int items) : n_(respondents), p_(items) {
  require(respondents > 0 && items > 0, "ItemResponseMatrix: dimensions must be positive");
  entries_.assign(static_cast<std::size_t>(respondents * items), 0);
}

ItemResponseMatrix::ItemResponseMatrix(int respondents, int items, std::vector<std::uint8_t> entries)
    : n_(respondents), p_(items), entries_(std::move(entries)) {
  require(respondents > 0 && items > 0, "ItemResponseMatrix: dimensions must be positive");
  require(entries_.size() == static_cast<std::size_t>(respondents * items),
          "ItemResponseMatrix: expected " + std::to_string(respondents * items) + " entries, got " +
              std::to_string(entries_.size()));
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    require(entries_[k] <= 1, "ItemResponseMatrix: entry " + std::to_string(k) + " is not 0/1");
  }
}

Vector isingnet_suffstats(const ItemResponseMatrix& x) {
  const int p = x.items();
  Vector s = Vector::Zero(p + p * (p - 1) / 2);
  for (int i = 0; i < x.respondents(); ++i) {
    for (int j = 0; j < p; ++j) {
      if (x(i, j) == 0) {
        continue;
      }
      s(j) += 1.0;
      for (int k = j + 1; k < p; ++k) {
        if (x(i, k) != 0) {
          s(static_cast<Eigen::Index>(isingnet_pair_index(p, j, k))) += 1.0;
        }
      }
    }
  }
  return s;
}

// --- PottsModel ------------------------------------------------------------

PottsModel::PottsModel(int rows, int cols, int colors) : rows_(rows), cols_(cols), colors_(colors) {
  require(rows > 0 && cols > 0, "PottsModel: dimensions must be positive");
  require(colors >= 1, "PottsModel: need at least one color");
}

void PottsModel::validate(const State& x) const {
  if (x.rows() != rows_ || x.cols() != cols_ || x.colors() != colors_) {
    throw DimensionMismatch("PottsModel: lattice is " + std::to_string(x.rows()) + "x" +
                            std::to_string(x.cols()) + " with K=" + std::to_string(x.colors()) +
                            ", model expects " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                            " with K=" + std::to_string(colors_));
  }
}

Vector PottsModel::suffstats(const State& x) const {
  Vector s(1);
  s(0) = potts_suffstat(x);
  return s;
}

Vector PottsModel::change_stat(const State& x, Site cell, int new_color) const {
  if (cell >= x.size()) {
    throw std::out_of_range("PottsModel::change_stat: cell " + std::to_string(cell) + " out of range");
  }
  if (new_color < 1 || new_color > colors_) {
    throw std::out_of_range("PottsModel::change_stat: color " + std::to_string(new_color) +
                            " outside 1.." + std::to_string(colors_));
  }
  const int old_color = x.at(cell);
  const int r = static_cast<int>(cell) / cols_;
  const int c = static_cast<int>(cell) % cols_;
  int delta = 0;
  auto visit = [&](int rr, int cc) {
    const int v = x(rr, cc);
    delta += (v == new_color) - (v == old_color);
  };
  if (r > 0) visit(r - 1, c);
  if (r + 1 < rows_) visit(r + 1, c);
  if (c > 0) visit(r, c - 1);
  if (c + 1 < cols_) visit(r, c + 1);
  Vector d(1);
  d(0) = static_cast<double>(delta);
  return d;
}

std::optional<std::uint64_t> PottsModel::state_count() const {
  return checked_pow(static_cast<std::uint64_t>(colors_), static_cast<std::uint64_t>(rows_ * cols_));
}

PottsModel::State PottsModel::decode(std::uint64_t index) const {
  State x(rows_, cols_, colors_);
  const auto k = static_cast<std::uint64_t>(colors_);
  for (std::size_t cell = 0; cell < x.size(); ++cell) {
    x.set(cell, static_cast<int>(index % k) + 1);
    index /= k;
  }
  return x;
}

std::uint64_t PottsModel::encode(const State& x) const {
  std::uint64_t index = 0;
  for (std::size_t cell = x.size(); cell-- > 0;) {
    index = index * static_cast<std::uint64_t>(colors_) + static_cast<std::uint64_t>(x.at(cell) - 1);
  }
  return index;
}

// --- ErgmModel -------------------------------------------------------------

ErgmModel::ErgmModel(int nodes) : nodes_(nodes) {
  require(nodes >= 2, "ErgmModel: need at least two nodes");
}

void ErgmModel::validate(const State& g) const {
  if (g.nodes() != nodes_) {
    throw DimensionMismatch("ErgmModel: graph has " + std::to_string(g.nodes()) +
                            " nodes, model expects " + std::to_string(nodes_));
  }
}

std::pair<double, double> ErgmModel::add_edge_change(const State& g, int i, int j) const {
  const auto ri = g.row(i);
  const auto rj = g.row(j);
  int common = 0;
  double dgwesp = 0.0;
  for (std::size_t w = 0; w < ri.size(); ++w) {
    std::uint64_t both = ri[w] & rj[w];
    common += std::popcount(both);
    while (both != 0) {
      const int h = static_cast<int>(w * 64) + std::countr_zero(both);
      both &= both - 1;
      const int sih = g.shared_partners(i, h);
      const int sjh = g.shared_partners(j, h);
      dgwesp += gwesp_weight(sih + 1) - gwesp_weight(sih);
      dgwesp += gwesp_weight(sjh + 1) - gwesp_weight(sjh);
    }
  }
  dgwesp += gwesp_weight(common);
  return {1.0, dgwesp};
}

Vector ErgmModel::change_stat(const State& g, Site dyad, bool present) const {
  if (dyad.i < 0 || dyad.j < 0 || dyad.i >= nodes_ || dyad.j >= nodes_ || dyad.i == dyad.j) {
    throw std::out_of_range("ErgmModel::change_stat: invalid dyad (" + std::to_string(dyad.i) + ", " +
                            std::to_string(dyad.j) + ")");
  }
  Vector d = Vector::Zero(2);
  const bool current = g.has_edge(dyad.i, dyad.j);
  if (current == present) {
    return d;
  }
  if (present) {
    const auto [de, dg] = add_edge_change(g, dyad.i, dyad.j);
    d << de, dg;
  } else {
    State without = g;
    without.set_edge(dyad.i, dyad.j, false);
    const auto [de, dg] = add_edge_change(without, dyad.i, dyad.j);
    d << -de, -dg;
  }
  return d;
}

std::optional<std::uint64_t> ErgmModel::state_count() const {
  const auto dyads = static_cast<std::uint64_t>(nodes_) * static_cast<std::uint64_t>(nodes_ - 1) / 2;
  if (dyads > 62) {
    return std::nullopt;
  }
  return std::uint64_t{1} << dyads;
}

ErgmModel::State ErgmModel::decode(std::uint64_t index) const {
  State g(nodes_);
  int bit = 0;
  for (int i = 0; i < nodes_; ++i) {
    for (int j = i + 1; j < nodes_; ++j) {
      if ((index >> bit) & 1U) {
        g.set_edge(i, j, true);
      }
      ++bit;
    }
  }
  return g;
}

std::uint64_t ErgmModel::encode(const State& g) const {
  std::uint64_t index = 0;
  int bit = 0;
  for (int i = 0; i < nodes_; ++i) {
    for (int j = i + 1; j < nodes_; ++j) {
      if (g.has_edge(i, j)) {
        index |= std::uint64_t{1} << bit;
      }
      ++bit;
    }
  }
  return index;
}

// --- IsingNetworkModel -----------------------------------------------------

IsingNetworkModel::IsingNetworkModel(int respondents, int items) : n_(respondents), p_(items) {
  require(respondents > 0 && items > 0, "IsingNetworkModel: dimensions must be positive");
}

std::size_t IsingNetworkModel::dim() const {
  return static_cast<std::size_t>(p_ + p_ * (p_ - 1) / 2);
}

void IsingNetworkModel::validate(const State& x) const {
  if (x.respondents() != n_ || x.items() != p_) {
    throw DimensionMismatch("IsingNetworkModel: data is " + std::to_string(x.respondents()) + "x" +
                            std::to_string(x.items()) + ", model expects " + std::to_string(n_) + "x" +
                            std::to_string(p_));
  }
}

Vector IsingNetworkModel::change_stat(const State& x, Site cell, int new_value) const {
  if (cell.row < 0 || cell.row >= n_ || cell.item < 0 || cell.item >= p_) {
    throw std::out_of_range("IsingNetworkModel::change_stat: invalid cell (" + std::to_string(cell.row) +
                            ", " + std::to_string(cell.item) + ")");
  }
  if (new_value != 0 && new_value != 1) {
    throw std::out_of_range("IsingNetworkModel::change_stat: value must be 0 or 1");
  }
  Vector d = Vector::Zero(static_cast<Eigen::Index>(dim()));
  const int delta = new_value - x(cell.row, cell.item);
  if (delta == 0) {
    return d;
  }
  const int j = cell.item;
  d(j) = delta;
  for (int k = 0; k < p_; ++k) {
    if (k == j || x(cell.row, k) == 0) {
      continue;
    }
    const auto idx = j < k ? isingnet_pair_index(p_, j, k) : isingnet_pair_index(p_, k, j);
    d(static_cast<Eigen::Index>(idx)) = delta;
  }
  return d;
}

std::optional<std::uint64_t> IsingNetworkModel::state_count() const {
  const auto cells = static_cast<std::uint64_t>(n_) * static_cast<std::uint64_t>(p_);
  if (cells > 62) {
    return std::nullopt;
  }
  return std::uint64_t{1} << cells;
}

IsingNetworkModel::State IsingNetworkModel::decode(std::uint64_t index) const {
  State x(n_, p_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < p_; ++j) {
      x.set(i, j, static_cast<int>((index >> (i * p_ + j)) & 1U));
    }
  }
  return x;
}

std::uint64_t IsingNetworkModel::encode(const State& x) const {
  std::uint64_t index = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < p_; ++j) {
      if (x(i, j) != 0) {
        index |= std::uint64_t{1} << (i * p_ + j);
      }
    }
  }
  return index;
}

}  // namespace dimc
