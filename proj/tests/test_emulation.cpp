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

#include "dimc/diagnostics.hpp"
#include "dimc/emulation.hpp"
#include "dimc/enumeration.hpp"
#include "dimc/gp.hpp"
#include "dimc/snis.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace dimc;

namespace {

const PottsModel kPotts(2, 2, 2);

PottsLattice potts_data() { return PottsLattice(2, 2, 2, {1, 1, 2, 2}); }

AuxStatPool potts_pool(double reference, std::size_t n, std::uint64_t seed, int spacing = 1) {
  RngStream rng(seed);
  return build_pool(kPotts, Vector::Constant(1, reference), n, PoolOptions{InnerKind::GibbsSweep, 100, spacing},
                    potts_data(), rng);
}

// Total length of a minimum spanning tree by Kruskal on all pairs.
double kruskal_length(const Matrix& x) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      edges.emplace_back((x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j))).norm(), i, j);
  std::sort(edges.begin(), edges.end());
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
    return parent[a] == a ? a : parent[a] = find(parent[a]);
  };
  double total = 0.0;
  for (auto [w, i, j] : edges) {
    if (find(i) != find(j)) {
      parent[find(i)] = find(j);
      total += w;
    }
  }
  return total;
}

}  // namespace

TEST_CASE("pool construction") {
  const AuxStatPool one = potts_pool(0.5, 1, 1);
  CHECK(one.size() == 1);
  CHECK(one.counts().sum() == 1);
  CHECK_THROWS(potts_pool(0.5, 0, 1));

  const Enumeration<PottsModel> exact(kPotts);
  const AuxStatPool pool = potts_pool(0.7, 50000, 2);
  CHECK(pool.counts().sum() == 50000);
  const double se = std::sqrt(batch_means_cov(pool.stats())(0, 0) / 50000.0);
  CHECK(std::abs(pool.stats().mean() - exact.mean_stats(Vector::Constant(1, 0.7))(0)) < 3 * se);
}

TEST_CASE("snis is exact at the reference") {
  const AuxStatPool pool = potts_pool(0.5, 2000, 3);
  const SnisMoments m = snis_moments(pool, Vector::Constant(1, 0.5));
  CHECK(m.log_ratio == 0.0);
  CHECK(m.ess == doctest::Approx(2000.0).epsilon(1e-12));
  CHECK(m.mean(0) == doctest::Approx(pool.stats().mean()).epsilon(1e-12));
  CHECK(snis_log_ratio(pool, Vector::Constant(1, 0.5)).log_ratio == 0.0);
  CHECK_THROWS_AS(snis_moments(pool, Vector::Zero(2)), DimensionMismatch);
  CHECK_THROWS_AS(snis_moments(pool, Vector::Constant(1, 1e308)), SnisUnderflow);
}

TEST_CASE("snis log ratio matches enumeration") {
  const AuxStatPool pool = potts_pool(0.5, 100000, 4);
  const double truth = oracle::potts2x2_log_c(1.0) - oracle::potts2x2_log_c(0.5);
  CHECK(std::abs(snis_log_ratio(pool, Vector::Constant(1, 1.0)).log_ratio - truth) < 0.01);

  const SnisMoments m = snis_moments(pool, Vector::Constant(1, 0.9));
  const Enumeration<PottsModel> exact(kPotts);
  const Vector t = Vector::Constant(1, 0.9);
  CHECK(std::abs(m.mean(0) - exact.mean_stats(t)(0)) < 0.03);
  CHECK(std::abs(m.cov(0, 0) - exact.cov_stats(t)(0, 0)) < 0.05);
}

TEST_CASE("snis ratios are antisymmetric") {
  const double a = 0.4, b = 0.8;
  for (std::size_t n : {1000u, 100000u}) {
    const SnisRatio ab = snis_log_ratio(potts_pool(a, n, 5), Vector::Constant(1, b));
    const SnisRatio ba = snis_log_ratio(potts_pool(b, n, 6), Vector::Constant(1, a));
    const double se = std::sqrt(log_ratio_variance(ab, n) + log_ratio_variance(ba, n));
    CHECK(std::abs(ab.log_ratio + ba.log_ratio) < 2 * se + 1e-3);
  }
}

TEST_CASE("effective sample size falls along a ray") {
  std::vector<double> mean_ess(5, 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const AuxStatPool pool = potts_pool(0.5, 5000, 100 + seed);
    for (int k = 0; k < 5; ++k) mean_ess[static_cast<std::size_t>(k)] += snis_moments(pool, Vector::Constant(1, 0.5 + 0.3 * k)).ess;
  }
  for (int k = 1; k < 5; ++k) CHECK(mean_ess[static_cast<std::size_t>(k)] < mean_ess[static_cast<std::size_t>(k - 1)]);
}

TEST_CASE("particle tree is a minimum spanning tree") {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> z;
  Matrix x(40, 2);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(gen);
  const ParticleTree tree = nearest_particle_tree(x);
  double total = 0.0;
  std::vector<char> seen(40, 0);
  for (int j : tree.order) {
    if (tree.parent[static_cast<std::size_t>(j)] >= 0) {
      CHECK(seen[static_cast<std::size_t>(tree.parent[static_cast<std::size_t>(j)])]);
      total += (x.row(j) - x.row(tree.parent[static_cast<std::size_t>(j)])).norm();
    }
    seen[static_cast<std::size_t>(j)] = 1;
  }
  CHECK(total == doctest::Approx(kruskal_length(x)));
  CHECK(tree.parent[static_cast<std::size_t>(tree.root)] == -1);
  CHECK(static_cast<std::size_t>(tree.root) == nearest_particle(x, x.colwise().mean().transpose()));
}

TEST_CASE("farthest point thinning") {
  Matrix x(6, 1);
  x << 0.0, 0.1, 0.2, 5.0, 10.0, 10.1;
  const Matrix t = farthest_point_thinning(x, 3);
  CHECK(t(0, 0) == 5.0);
  CHECK(((t(1, 0) == 0.0 && t(2, 0) >= 10.0) || (t(1, 0) >= 10.0 && t(2, 0) == 0.0)));
  CHECK_THROWS(farthest_point_thinning(x, 7));
  CHECK_THROWS(farthest_point_thinning(x, 0));
}

TEST_CASE("log-likelihood at particles") {
  const PottsLattice data = potts_data();
  const Vector s = kPotts.suffstats(data);
  TelescopeOptions opt;
  opt.n = 10000;
  RngStream rng(31);

  Matrix single(1, 1);
  single << 0.8;
  const LoglikEstimates one = estimate_loglik_at_particles(kPotts, single, s, opt, data, rng);
  CHECK(one.values(0) == doctest::Approx(0.8 * s(0)));
  CHECK(one.noise(0) == 0.0);

  Matrix twin(2, 1);
  twin << 0.6, 0.6;
  const LoglikEstimates two = estimate_loglik_at_particles(kPotts, twin, s, opt, data, rng);
  CHECK(two.values(0) == two.values(1));

  Matrix five(5, 1);
  five << 0.2, 0.5, 0.8, 1.1, 1.4;
  const LoglikEstimates est = estimate_loglik_at_particles(kPotts, five, s, opt, data, rng);
  Vector truth(5);
  for (int i = 0; i < 5; ++i) truth(i) = five(i, 0) * s(0) - oracle::potts2x2_log_c(five(i, 0));
  const double shift = (truth - est.values).mean();
  CHECK((est.values.array() + shift - truth.array()).abs().maxCoeff() < 0.05);
  CHECK(est.noise.minCoeff() >= 0.0);

  Matrix far(2, 1);
  far << 0.0, 6.0;
  opt.n = 200;
  CHECK_THROWS_AS(estimate_loglik_at_particles(kPotts, far, s, opt, data, rng), EssTooLow);
}

TEST_CASE("telescoped path is invariant to reversal") {
  Matrix pts(4, 1);
  pts << 0.2, 0.6, 1.0, 1.4;
  TelescopeOptions opt;
  opt.n = 20000;
  RngStream rng(41);
  const PottsLattice data = potts_data();
  const auto [fwd, fwd_var] = telescope_path(kPotts, pts, {0, 1, 2, 3}, opt, data, rng);
  RngStream rng2(42);
  const auto [bwd, bwd_var] = telescope_path(kPotts, pts, {3, 2, 1, 0}, opt, data, rng2);
  CHECK(std::abs(fwd(3) + bwd(3)) < 2.0 * std::sqrt(fwd_var(3) + bwd_var(3)) + 1e-3);
  const double truth = oracle::potts2x2_log_c(1.4) - oracle::potts2x2_log_c(0.2);
  CHECK(std::abs(fwd(3) - truth) < 0.05);
}

TEST_CASE("gaussian process interpolation") {
  Matrix x(8, 2);
  Vector y(8);
  for (int i = 0; i < 8; ++i) {
    x(i, 0) = 0.3 * i;
    x(i, 1) = std::sin(1.7 * i);
    y(i) = std::cos(x(i, 0)) + 0.5 * x(i, 1) * x(i, 1) + 3.0;
  }
  const GpSurrogate gp = gp_fit(x, y, Vector::Zero(8));
  for (int i = 0; i < 8; ++i) {
    CHECK(std::abs(gp.predict_mean(x.row(i).transpose()) - y(i)) <= 1e-6 * std::abs(y(i)));
  }
  const GpSurrogate flat = gp_fit(x, Vector::Constant(8, -2.5), Vector::Zero(8));
  for (double a : {-3.0, 0.0, 0.7, 10.0}) {
    CHECK(std::abs(flat.predict_mean(Vector::Constant(2, a)) + 2.5) < 1e-6);
  }
  CHECK_THROWS(gp_fit(x.topRows(1), y.head(1), Vector::Zero(1)));

  const GpSurrogate back = GpSurrogate::from_json(gp.to_json());
  CHECK(back.predict_mean(Vector::Constant(2, 0.4)) == doctest::Approx(gp.predict_mean(Vector::Constant(2, 0.4))));
}

TEST_CASE("gaussian process held-one-out predictions on the potts curve") {
  Matrix five(5, 1);
  five << 0.2, 0.5, 0.8, 1.1, 1.4;
  const PottsLattice data = potts_data();
  const Vector s = kPotts.suffstats(data);
  TelescopeOptions opt;
  RngStream rng(51);
  const LoglikEstimates est = estimate_loglik_at_particles(kPotts, five, s, opt, data, rng);
  int covered = 0;
  for (int out = 0; out < 5; ++out) {
    Matrix xs(4, 1);
    Vector ys(4), ns(4);
    for (int i = 0, k = 0; i < 5; ++i) {
      if (i == out) continue;
      xs(k, 0) = five(i, 0);
      ys(k) = est.values(i);
      ns(k) = est.noise(i);
      ++k;
    }
    const GpSurrogate gp = gp_fit(xs, ys, ns);
    const auto [mean, var] = gp.predict(five.row(out).transpose());
    covered += std::abs(mean - est.values(out)) < 2.0 * std::sqrt(var + est.noise(out)) ? 1 : 0;
  }
  CHECK(covered >= 4);
}
