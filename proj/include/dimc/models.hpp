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

#ifndef DIMC_MODELS_HPP
#define DIMC_MODELS_HPP

#include "dimc/errors.hpp"
#include "dimc/linalg.hpp"

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace dimc {

/// Decay of the geometrically weighted edgewise shared partner statistic.
inline constexpr double kGwespDecay = 0.2;

/// Weight of an edge with k shared partners: e^a (1 - (1 - e^-a)^k).
double gwesp_weight(int shared_partners);

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// rows x cols lattice with colors in {1..K}; 4-neighborhood, free boundary.
class PottsLattice {
 public:
  PottsLattice(int rows, int cols, int colors);
  PottsLattice(int rows, int cols, int colors, std::vector<int> cells);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int colors() const { return colors_; }
  std::size_t size() const { return cells_.size(); }

  int operator()(int r, int c) const { return cells_[static_cast<std::size_t>(r * cols_ + c)]; }
  int at(std::size_t cell) const { return cells_[cell]; }
  /// Unchecked write; callers keep color in {1..K}.
  void set(std::size_t cell, int color) { cells_[cell] = color; }
  std::span<const int> cells() const { return cells_; }

  /// Number of neighbor pairs, 2rs - r - s.
  std::size_t edge_count() const;

  friend bool operator==(const PottsLattice&, const PottsLattice&) = default;

 private:
  int rows_;
  int cols_;
  int colors_;
  std::vector<int> cells_;
};

/// Simple undirected graph stored as one bit row per node.
class UndirectedGraph {
 public:
  explicit UndirectedGraph(int nodes);
  UndirectedGraph(int nodes, std::span<const std::pair<int, int>> edges);

  int nodes() const { return nodes_; }

  bool has_edge(int i, int j) const {
    return (bits_[row_offset(i) + static_cast<std::size_t>(j) / 64] >> (j % 64)) & 1U;
  }
  /// Sets or clears the dyad {i, j}; i != j.
  void set_edge(int i, int j, bool present);

  int degree(int i) const;
  std::size_t edge_count() const;
  /// Number of nodes adjacent to both i and j.
  int shared_partners(int i, int j) const;
  std::vector<std::pair<int, int>> edges() const;

  std::span<const std::uint64_t> row(int i) const {
    return {bits_.data() + row_offset(i), words_};
  }

  friend bool operator==(const UndirectedGraph&, const UndirectedGraph&) = default;

 private:
  std::size_t row_offset(int i) const { return static_cast<std::size_t>(i) * words_; }

  int nodes_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

/// n respondents x p items of binary responses.
class ItemResponseMatrix {
 public:
  ItemResponseMatrix(int respondents, int items);
  ItemResponseMatrix(int respondents, int items, std::vector<std::uint8_t> entries);

  int respondents() const { return n_; }
  int items() const { return p_; }
  int operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i * p_ + j)]; }
  void set(int i, int j, int value) { entries_[static_cast<std::size_t>(i * p_ + j)] = static_cast<std::uint8_t>(value); }
  std::span<const std::uint8_t> entries() const { return entries_; }

  friend bool operator==(const ItemResponseMatrix&, const ItemResponseMatrix&) = default;

 private:
  int n_;
  int p_;
  std::vector<std::uint8_t> entries_;
};

// ---------------------------------------------------------------------------
// Sufficient statistics
// ---------------------------------------------------------------------------

/// Count of same-colored neighbor pairs.
double potts_suffstat(const PottsLattice& lattice);

/// (edge count, GWESP with decay 0.2).
Vector ergm_suffstats(const UndirectedGraph& graph);

/// Column sums followed by pairwise co-occurrence counts, pairs (j<k) in
/// lexicographic order.
Vector isingnet_suffstats(const ItemResponseMatrix& data);

/// Position of the (j, k) interaction, j < k, inside an Ising-network
/// parameter vector with p items.
inline std::size_t isingnet_pair_index(int p, int j, int k) {
  // p main effects, then rows of the strict upper triangle.
  const auto jj = static_cast<std::size_t>(j);
  const auto pp = static_cast<std::size_t>(p);
  return pp + jj * pp - jj * (jj + 1) / 2 + static_cast<std::size_t>(k - j - 1);
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

struct Dyad {
  int i;
  int j;
};

struct Cell {
  int row;
  int item;
};

class PottsModel {
 public:
  using State = PottsLattice;
  using Site = std::size_t;

  PottsModel(int rows, int cols, int colors);

  static constexpr std::string_view name() { return "potts"; }
  std::size_t dim() const { return 1; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int colors() const { return colors_; }

  void validate(const State& state) const;
  Vector suffstats(const State& state) const;
  /// S(x') - S(x) for recoloring one cell.
  Vector change_stat(const State& state, Site cell, int new_color) const;

  /// K^(rows*cols), or empty when it does not fit in 63 bits.
  std::optional<std::uint64_t> state_count() const;
  State decode(std::uint64_t index) const;
  std::uint64_t encode(const State& state) const;
  State initial_state() const { return State(rows_, cols_, colors_); }

 private:
  int rows_;
  int cols_;
  int colors_;
};

class ErgmModel {
 public:
  using State = UndirectedGraph;
  using Site = Dyad;

  explicit ErgmModel(int nodes);

  static constexpr std::string_view name() { return "ergm"; }
  std::size_t dim() const { return 2; }
  int nodes() const { return nodes_; }

  void validate(const State& state) const;
  Vector suffstats(const State& state) const { return ergm_suffstats(state); }
  Vector change_stat(const State& state, Site dyad, bool present) const;
  /// Change in (edges, GWESP) from adding dyad {i, j} to a graph where it
  /// is absent. The graph must not contain the edge.
  std::pair<double, double> add_edge_change(const State& state, int i, int j) const;

  std::optional<std::uint64_t> state_count() const;
  State decode(std::uint64_t index) const;
  std::uint64_t encode(const State& state) const;
  State initial_state() const { return State(nodes_); }

 private:
  int nodes_;
};

class IsingNetworkModel {
 public:
  using State = ItemResponseMatrix;
  using Site = Cell;

  IsingNetworkModel(int respondents, int items);

  static constexpr std::string_view name() { return "isingnet"; }
  std::size_t dim() const;
  int respondents() const { return n_; }
  int items() const { return p_; }

  void validate(const State& state) const;
  Vector suffstats(const State& state) const { return isingnet_suffstats(state); }
  Vector change_stat(const State& state, Site cell, int new_value) const;

  std::optional<std::uint64_t> state_count() const;
  State decode(std::uint64_t index) const;
  std::uint64_t encode(const State& state) const;
  State initial_state() const { return State(n_, p_); }

 private:
  int n_;
  int p_;
};

/// One of the three supported model kinds with its structural constants.
using ModelSpec = std::variant<PottsModel, ErgmModel, IsingNetworkModel>;

inline void check_dimension(std::size_t expected, const Vector& theta, std::string_view what) {
  if (static_cast<std::size_t>(theta.size()) != expected) {
    throw DimensionMismatch(std::string(what) + ": expected length " + std::to_string(expected) +
                            ", got " + std::to_string(theta.size()));
  }
}

/// Unnormalized log density theta' S(x).
template <class Model>
double log_h(const Model& model, const typename Model::State& state, const Vector& theta) {
  check_dimension(model.dim(), theta, "log_h theta");
  return theta.dot(model.suffstats(state));
}

}  // namespace dimc

#endif  // DIMC_MODELS_HPP
