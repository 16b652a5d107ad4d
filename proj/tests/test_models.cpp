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

#include "dimc/enumeration.hpp"
#include "dimc/models.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace dimc;

namespace {

UndirectedGraph to_graph(const oracle::AdjMatrix& a) {
  UndirectedGraph g(static_cast<int>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (a[i][j]) g.set_edge(static_cast<int>(i), static_cast<int>(j), true);
  return g;
}

UndirectedGraph triangle() {
  const std::vector<std::pair<int, int>> e{{0, 1}, {1, 2}, {0, 2}};
  return UndirectedGraph(3, e);
}

PottsLattice random_lattice(int r, int c, int k, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> color(1, k);
  std::vector<int> cells(static_cast<std::size_t>(r * c));
  for (auto& v : cells) v = color(gen);
  return PottsLattice(r, c, k, cells);
}

}  // namespace

TEST_CASE("potts statistic on small lattices") {
  CHECK(potts_suffstat(PottsLattice(2, 2, 2, {1, 1, 1, 1})) == 4);
  CHECK(potts_suffstat(PottsLattice(2, 2, 2, {1, 2, 2, 1})) == 0);
  CHECK(PottsLattice(30, 30, 4).edge_count() == 1740);
  CHECK(potts_suffstat(PottsLattice(30, 30, 4)) == 1740);
}

TEST_CASE("potts statistic is invariant under color permutations") {
  std::mt19937_64 gen(11);
  std::vector<int> perm{1, 2, 3, 4};
  for (int rep = 0; rep < 50; ++rep) {
    const PottsLattice x = random_lattice(6, 5, 4, gen);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<int> relabeled(x.cells().begin(), x.cells().end());
    for (auto& v : relabeled) v = perm[static_cast<std::size_t>(v - 1)];
    CHECK(potts_suffstat(PottsLattice(6, 5, 4, relabeled)) == potts_suffstat(x));
    CHECK(potts_suffstat(x) == oracle::potts_matches(std::vector<int>(x.cells().begin(), x.cells().end()), 6, 5));
  }
}

TEST_CASE("ergm statistics: empty graph and triangle") {
  CHECK(ergm_suffstats(UndirectedGraph(7)).isZero());
  const Vector s = ergm_suffstats(triangle());
  CHECK(s(0) == 3.0);
  CHECK(s(1) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("gwesp matches the brute-force shared partner count") {
  std::mt19937_64 gen(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = oracle::random_graph(10, 0.1 + 0.008 * rep, gen);
    const Vector s = ergm_suffstats(to_graph(a));
    CHECK(s(0) == oracle::edge_count(a));
    CHECK(std::abs(s(1) - oracle::gwesp(a)) <= 1e-12 * std::max(1.0, oracle::gwesp(a)));
  }
}

TEST_CASE("gwesp equals ESP_1 when no edge has more than one shared partner") {
  // Two triangles sharing a vertex plus a pendant path.
  const std::vector<std::pair<int, int>> e{{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {2, 4}, {4, 5}, {5, 6}};
  const UndirectedGraph g(7, e);
  int esp1 = 0;
  for (auto [i, j] : g.edges()) esp1 += g.shared_partners(i, j) == 1 ? 1 : 0;
  CHECK(ergm_suffstats(g)(1) == doctest::Approx(esp1).epsilon(1e-14));
}

TEST_CASE("ising network statistics") {
  CHECK(isingnet_suffstats(ItemResponseMatrix(4, 3)).isZero());
  const Vector s = isingnet_suffstats(ItemResponseMatrix(1, 2, {1, 1}));
  REQUIRE(s.size() == 3);
  CHECK(s(0) == 1);
  CHECK(s(1) == 1);
  CHECK(s(2) == 1);
  CHECK(IsingNetworkModel(316, 12).dim() == 78);
  CHECK(isingnet_pair_index(4, 0, 1) == 4);
  CHECK(isingnet_pair_index(4, 2, 3) == 9);

  std::mt19937_64 gen(5);
  std::bernoulli_distribution b(0.4);
  std::vector<std::uint8_t> entries(7 * 4);
  for (auto& v : entries) v = b(gen) ? 1 : 0;
  const ItemResponseMatrix x(7, 4, entries);
  const Vector t = isingnet_suffstats(x);
  for (int j = 0; j < 4; ++j) {
    int col = 0;
    for (int i = 0; i < 7; ++i) col += x(i, j);
    CHECK(t(j) == col);
    for (int k = j + 1; k < 4; ++k) {
      int both = 0;
      for (int i = 0; i < 7; ++i) both += x(i, j) * x(i, k);
      CHECK(t(static_cast<Eigen::Index>(isingnet_pair_index(4, j, k))) == both);
    }
  }
}

TEST_CASE("log_h") {
  const PottsModel potts(2, 2, 2);
  const PottsLattice same(2, 2, 2, {1, 1, 1, 1});
  CHECK(log_h(potts, same, Vector::Zero(1)) == 0.0);
  CHECK(log_h(potts, same, Vector::Ones(1)) == 4.0);
  const ErgmModel ergm(3);
  Vector theta(2);
  theta << 0.5, -0.25;
  CHECK(log_h(ergm, triangle(), theta) == doctest::Approx(0.75));
  CHECK_THROWS_AS(log_h(ergm, triangle(), Vector::Zero(3)), DimensionMismatch);
}

TEST_CASE("change statistics agree with full recomputation") {
  std::mt19937_64 gen(77);
  SUBCASE("potts") {
    const PottsModel model(5, 6, 3);
    std::uniform_int_distribution<int> cell(0, 29), color(1, 3);
    for (int rep = 0; rep < 1000; ++rep) {
      PottsLattice x = random_lattice(5, 6, 3, gen);
      const auto c = static_cast<std::size_t>(cell(gen));
      const int k = color(gen);
      const Vector delta = model.change_stat(x, c, k);
      const Vector before = model.suffstats(x);
      x.set(c, k);
      CHECK(model.suffstats(x)(0) == before(0) + delta(0));
    }
    CHECK(model.change_stat(PottsLattice(5, 6, 3), 3, 1).isZero());
    CHECK_THROWS(model.change_stat(PottsLattice(5, 6, 3), 30, 1));
    CHECK_THROWS(model.change_stat(PottsLattice(5, 6, 3), 0, 4));
  }
  SUBCASE("potts recolor corner of a uniform 2x2") {
    const PottsModel model(2, 2, 2);
    CHECK(model.change_stat(PottsLattice(2, 2, 2, {1, 1, 1, 1}), 0, 2)(0) == -2);
  }
  SUBCASE("ergm") {
    const ErgmModel model(9);
    std::uniform_int_distribution<int> node(0, 8);
    for (int rep = 0; rep < 1000; ++rep) {
      const auto a = oracle::random_graph(9, 0.35, gen);
      UndirectedGraph g = to_graph(a);
      int i = node(gen), j = node(gen);
      while (j == i) j = node(gen);
      const bool present = std::bernoulli_distribution(0.5)(gen);
      const Vector delta = model.change_stat(g, Dyad{i, j}, present);
      const Vector before = model.suffstats(g);
      g.set_edge(i, j, present);
      const Vector after = model.suffstats(g);
      CHECK(after(0) == before(0) + delta(0));
      CHECK(std::abs(after(1) - before(1) - delta(1)) <= 1e-12);
    }
    CHECK_THROWS(model.change_stat(UndirectedGraph(9), Dyad{2, 2}, true));
    CHECK_THROWS(model.change_stat(UndirectedGraph(9), Dyad{0, 9}, true));
  }
  SUBCASE("ergm triangle edge deletion") {
    const ErgmModel model(3);
    const Vector delta = model.change_stat(triangle(), Dyad{0, 1}, false);
    UndirectedGraph g = triangle();
    g.set_edge(0, 1, false);
    CHECK(delta(0) == -1);
    CHECK(delta(1) == doctest::Approx(oracle::gwesp({{0, 0, 1}, {0, 0, 1}, {1, 1, 0}}) - 3.0));
  }
  SUBCASE("ising network") {
    const IsingNetworkModel model(6, 4);
    std::uniform_int_distribution<int> row(0, 5), item(0, 3), bit(0, 1);
    for (int rep = 0; rep < 1000; ++rep) {
      std::vector<std::uint8_t> entries(24);
      for (auto& v : entries) v = static_cast<std::uint8_t>(bit(gen));
      ItemResponseMatrix x(6, 4, entries);
      const Cell c{row(gen), item(gen)};
      const int v = bit(gen);
      const Vector delta = model.change_stat(x, c, v);
      const Vector before = model.suffstats(x);
      x.set(c.row, c.item, v);
      CHECK((model.suffstats(x) - before - delta).isZero());
    }
    CHECK_THROWS(model.change_stat(ItemResponseMatrix(6, 4), Cell{6, 0}, 1));
  }
}

TEST_CASE("enumeration of the normalizing function") {
  const PottsModel potts(2, 2, 2);
  CHECK(enumerate_log_normalizer(potts, Vector::Zero(1)) == doctest::Approx(std::log(16.0)));
  CHECK(enumerate_log_normalizer(potts, Vector::Ones(1)) == doctest::Approx(oracle::potts2x2_log_c(1.0)));

  const auto mult = oracle::potts_multiplicities(3, 2, 3);
  for (double t : {-0.7, 0.0, 0.4, 1.3}) {
    CHECK(enumerate_log_normalizer(PottsModel(3, 2, 3), Vector::Constant(1, t)) ==
          doctest::Approx(oracle::log_c_from(mult, t)).epsilon(1e-12));
  }
  CHECK(enumerate_log_normalizer(ErgmModel(3), Vector::Zero(2)) == doctest::Approx(std::log(8.0)));
  CHECK(enumerate_log_normalizer(ErgmModel(5), Vector::Zero(2)) == doctest::Approx(10 * std::log(2.0)));
  CHECK(enumerate_log_normalizer(IsingNetworkModel(3, 3), Vector::Zero(6)) == doctest::Approx(9 * std::log(2.0)));

  // ERGM on 4 nodes against a brute-force sum over all 64 graphs.
  Vector theta(2);
  theta << -0.3, 0.45;
  double total = 0.0;
  for (int mask = 0; mask < 64; ++mask) {
    oracle::AdjMatrix a(4, std::vector<int>(4, 0));
    int bit = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j, ++bit)
        if (mask >> bit & 1) a[i][j] = a[j][i] = 1;
    total += std::exp(theta(0) * oracle::edge_count(a) + theta(1) * oracle::gwesp(a));
  }
  CHECK(enumerate_log_normalizer(ErgmModel(4), theta) == doctest::Approx(std::log(total)).epsilon(1e-12));
}

TEST_CASE("enumeration refuses large state spaces") {
  CHECK_THROWS_AS(enumerate_log_normalizer(PottsModel(30, 30, 4), Vector::Ones(1)), IntractableError);
  CHECK_THROWS_AS(enumerate_log_normalizer(PottsModel(2, 2, 2), Vector::Ones(1), 15), IntractableError);
  try {
    enumerate_log_normalizer(ErgmModel(16), Vector::Zero(2));
    FAIL("expected an exception");
  } catch (const IntractableError& e) {
    CHECK(std::string(e.what()).find("intractable at this size") != std::string::npos);
  }
}

TEST_CASE("state encoding round trips") {
  const PottsModel potts(2, 3, 3);
  for (std::uint64_t s = 0; s < *potts.state_count(); s += 37) CHECK(potts.encode(potts.decode(s)) == s);
  const ErgmModel ergm(5);
  for (std::uint64_t s = 0; s < *ergm.state_count(); s += 13) CHECK(ergm.encode(ergm.decode(s)) == s);
  const IsingNetworkModel ising(3, 3);
  for (std::uint64_t s = 0; s < *ising.state_count(); s += 7) CHECK(ising.encode(ising.decode(s)) == s);
  CHECK_FALSE(PottsModel(30, 30, 4).state_count().has_value());
}

TEST_CASE("model validation rejects mismatched states") {
  CHECK_THROWS_AS(PottsModel(3, 3, 2).validate(PottsLattice(2, 2, 2)), DimensionMismatch);
  CHECK_THROWS_AS(ErgmModel(4).validate(UndirectedGraph(5)), DimensionMismatch);
  CHECK_THROWS_AS(IsingNetworkModel(2, 2).validate(ItemResponseMatrix(2, 3)), DimensionMismatch);
  CHECK_THROWS(PottsLattice(2, 2, 2, {1, 3, 1, 1}));
}
