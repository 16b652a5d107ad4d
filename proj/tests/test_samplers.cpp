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

#include "dimc/chain.hpp"
#include "dimc/samplers.hpp"
#include "dimc/spike_slab.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace dimc;

namespace {

const PottsModel kPotts(2, 2, 2);

PottsLattice potts_data() { return PottsLattice(2, 2, 2, {1, 1, 2, 2}); }

Prior box(double lo, double hi) { return Prior::uniform_box(Vector::Constant(1, lo), Vector::Constant(1, hi)); }

std::vector<double> column(const Trace& t, std::size_t c, std::size_t from = 0) {
  std::vector<double> out;
  for (std::size_t i = from; i < t.rows(); ++i) out.push_back(t.row(i)[c]);
  return out;
}

Trace run(ChainSampler& s, std::size_t iterations, std::uint64_t seed, std::size_t burn_in = 0) {
  ChainOptions opt;
  opt.iterations = iterations;
  opt.burn_in = burn_in;
  opt.seed = seed;
  return run_chain(s, opt);
}

}  // namespace

TEST_CASE("exchange log ratio algebra") {
  const Prior prior = Prior::independent_normal(Vector::Constant(2, 0.3), Vector::Constant(2, 0.7));
  Vector a(2), b(2), sd(2), sa(2);
  a << 0.1, -0.4;
  b << 0.5, 0.2;
  sd << 3.0, 7.0;
  sa << 5.0, 1.0;
  CHECK(std::abs(exchange_log_ratio(prior, a, b, sd, sa) + exchange_log_ratio(prior, b, a, sd, sa)) < 1e-10);
  CHECK(exchange_log_ratio(prior, a, a, sd, sa) == 0.0);
  const double expected = prior.log_density(b) - prior.log_density(a) + (b - a).dot(sd) - (b - a).dot(sa);
  CHECK(exchange_log_ratio(prior, a, b, sd, sa) == doctest::Approx(expected));
}

TEST_CASE("candidates outside the prior support are rejected without a draw") {
  const Prior prior = box(0.0, 0.01);
  const RandomWalkProposal q = RandomWalkProposal::diagonal(Vector::Constant(1, 50.0));
  RngStream rng(3);
  int draws = 0, moves = 0;
  Vector theta = Vector::Constant(1, 0.005);
  for (int i = 0; i < 1000; ++i) {
    const StepOutcome out = auxiliary_variable_step(
        theta, Vector::Constant(1, 2.0), prior, q,
        [&](const Vector&, RngStream&) {
          ++draws;
          return Vector::Constant(1, 2.0);
        },
        rng);
    moves += out.accepted ? 1 : 0;
    CHECK(prior.in_support(out.theta));
    theta = out.theta;
  }
  CHECK(draws < 10);
  CHECK(moves == draws);
}

TEST_CASE("exchange sampler targets the exact posterior") {
  const Prior prior = box(0.0, 3.0);
  const Vector s = kPotts.suffstats(potts_data());
  const auto post = oracle::grid_posterior(
      [&](double t) { return t * s(0) - oracle::potts2x2_log_c(t); }, 0.0, 3.0, 20001);
  AuxSettings settings;
  settings.mode = AuxMode::Exchange;
  AuxiliaryVariableSampler<PottsModel> sampler(kPotts, potts_data(), prior,
                                                RandomWalkProposal::diagonal(Vector::Constant(1, 0.6)), settings,
                                                Vector::Constant(1, 1.0));
  const Trace t = run(sampler, 60000, 11, 1000);
  CHECK(oracle::ks_distance(column(t, 0, 1000), [&](double x) { return post.cdf(x); }) < 0.04);
  CHECK(t.label == "exchange");
}

TEST_CASE("exchange refuses models it cannot enumerate") {
  AuxSettings settings;
  settings.mode = AuxMode::Exchange;
  const PottsModel big(8, 8, 2);
  CHECK_THROWS_AS(AuxiliaryVariableSampler<PottsModel>(big, big.initial_state(), box(0, 1),
                                                       RandomWalkProposal::diagonal(Vector::Constant(1, 0.1)),
                                                       settings, Vector::Constant(1, 0.5)),
                  IntractableError);
}

TEST_CASE("abc with an infinite threshold returns the prior") {
  AuxSettings settings;
  settings.mode = AuxMode::Abc;
  const Prior prior = box(0.0, 3.0);
  AuxiliaryVariableSampler<PottsModel> sampler(kPotts, potts_data(), prior,
                                                RandomWalkProposal::diagonal(Vector::Constant(1, 1.5)), settings,
                                                Vector::Constant(1, 1.0));
  const Trace t = run(sampler, 40000, 12);
  CHECK(oracle::ks_distance(column(t, 0), [](double x) { return std::clamp(x / 3.0, 0.0, 1.0); }) < 0.03);
}

TEST_CASE("abc with a zero threshold never moves") {
  AuxSettings settings;
  settings.mode = AuxMode::Abc;
  settings.epsilon = 0.0;
  AuxiliaryVariableSampler<PottsModel> sampler(kPotts, potts_data(), box(0.0, 3.0),
                                                RandomWalkProposal::diagonal(Vector::Constant(1, 0.5)), settings,
                                                Vector::Constant(1, 1.0));
  const Trace t = run(sampler, 2000, 13);
  CHECK(t.accepted == 0);
  CHECK(t.diagnostics.dump().find("within") != std::string::npos);
}

TEST_CASE("dmh sampler validates its settings") {
  AuxSettings settings;
  settings.m = 0;
  CHECK_THROWS(AuxiliaryVariableSampler<PottsModel>(kPotts, potts_data(), box(0, 3),
                                                    RandomWalkProposal::diagonal(Vector::Constant(1, 0.5)), settings,
                                                    Vector::Constant(1, 1.0)));
  settings.m = 1;
  settings.inner = InnerKind::EdgeToggle;
  CHECK_THROWS(AuxiliaryVariableSampler<PottsModel>(kPotts, potts_data(), box(0, 3),
                                                    RandomWalkProposal::diagonal(Vector::Constant(1, 0.5)), settings,
                                                    Vector::Constant(1, 1.0)));
  settings.inner = InnerKind::GibbsSweep;
  CHECK_THROWS(AuxiliaryVariableSampler<PottsModel>(kPotts, potts_data(), box(0, 3),
                                                    RandomWalkProposal::diagonal(Vector::Constant(1, 0.5)), settings,
                                                    Vector::Constant(1, 5.0)));
}

TEST_CASE("alr particle normalizers converge") {
  Matrix particles(4, 1);
  particles << 0.3, 0.6, 0.9, 1.2;
  AlrSettings settings;
  AlrSampler<PottsModel> alr(kPotts, potts_data(), box(0.0, 3.0), RandomWalkProposal::diagonal(Vector::Constant(1, 0.5)),
                             particles, settings, Vector::Constant(1, 0.9));
  RngStream rng(21);
  for (int i = 0; i < 10000; ++i) alr.warm_up(rng);
  const int root = alr.tree().root;
  const double base = oracle::potts2x2_log_c(particles(root, 0));
  for (int j = 0; j < 4; ++j) {
    const double truth = oracle::potts2x2_log_c(particles(j, 0)) - base;
    CHECK(std::abs(alr.particle_log_normalizers()[static_cast<std::size_t>(j)] - truth) < 0.05);
  }
  const double mid = oracle::potts2x2_log_c(0.75) - base;
  CHECK(std::abs(alr.log_normalizer_estimate(Vector::Constant(1, 0.75)) - mid) < 0.05);
  CHECK(alr.far_proposals() == 0);
}

TEST_CASE("alr state round trip continues identically") {
  Matrix particles(3, 1);
  particles << 0.4, 0.8, 1.2;
  AlrSettings settings;
  settings.pool_cap = 50;
  auto make = [&] {
    return AlrSampler<PottsModel>(kPotts, potts_data(), box(0.0, 3.0),
                                  RandomWalkProposal::diagonal(Vector::Constant(1, 0.5)), particles, settings,
                                  Vector::Constant(1, 0.8));
  };
  auto a = make();
  RngStream rng(22);
  for (std::size_t i = 0; i < 200; ++i) a.step(i, rng);
  auto b = make();
  b.load_state(nlohmann::json::parse(a.save_state().dump()));
  RngStream ra = rng, rb = rng;
  for (std::size_t i = 200; i < 400; ++i) {
    a.step(i, ra);
    b.step(i, rb);
  }
  double ta = 0, tb = 0;
  a.current_row({&ta, 1});
  b.current_row({&tb, 1});
  CHECK(ta == tb);
  CHECK_THROWS(AlrSampler<PottsModel>(kPotts, potts_data(), box(0.0, 3.0),
                                      RandomWalkProposal::diagonal(Vector::Constant(1, 0.5)), particles.topRows(1),
                                      settings, Vector::Constant(1, 0.8)));
}

TEST_CASE("spike and slab conditionals") {
  const double s2 = 0.04, om = 3.0, t = 0.25;
  const double slab = std::exp(-t * t / (2 * om * om * s2)) / om;
  const double spike = std::exp(-t * t / (2 * s2));
  CHECK(inclusion_probability(t, s2, om) == doctest::Approx(slab / (slab + spike)));
  CHECK(inclusion_probability(0.0, s2, 1.0) == doctest::Approx(0.5));
  Vector th(2);
  th << 0.1, -0.3;
  const double lc = spike_slab_log_conditional(th, {1, 0}, s2, om);
  const double expected = -0.5 * std::log(2 * M_PI * om * om * s2) - 0.01 / (2 * om * om * s2) -
                          0.5 * std::log(2 * M_PI * s2) - 0.09 / (2 * s2);
  CHECK(lc == doctest::Approx(expected));
}

TEST_CASE("spike and slab without data samples the prior") {
  const IsingNetworkModel model(5, 2);
  SpikeSlabSettings settings;
  settings.use_likelihood = false;
  settings.theta_scales = Vector::Constant(3, 1.0);
  settings.adapt_until = 20000;
  const std::size_t p = model.dim();
  SpikeSlabSampler sampler(model, model.initial_state(), settings, spike_slab_initial_state(p, settings.hyper));
  const Trace t = run(sampler, 200000, 31, 5000);
  REQUIRE(t.width() == 2 * p + 2);
  CHECK(t.columns[p] == "lambda_1");
  CHECK(t.columns[2 * p] == "sigma2");
  CHECK(t.columns[2 * p + 1] == "omega");
  double lam = 0, tau = 0;
  std::vector<double> y;
  const std::size_t n = t.rows() - 5000;
  for (std::size_t i = 5000; i < t.rows(); ++i) {
    const auto r = t.row(i);
    for (std::size_t k = 0; k < p; ++k) lam += r[p + k];
    tau += 1.0 / r[2 * p];
    CHECK(1.0 / r[2 * p] >= 4.0 - 1e-9);
    CHECK(1.0 / r[2 * p] <= 100.0 + 1e-9);
    y.push_back(r[2 * p + 1] - 1.0);
  }
  CHECK(std::abs(lam / static_cast<double>(n * p) - 0.5) < 0.05);
  CHECK(std::abs(tau / static_cast<double>(n) - 52.0) < 5.0);
  std::nth_element(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(y.size() / 2), y.end());
  CHECK(std::abs(y[y.size() / 2] / (100.0 * std::log(2.0)) - 1.0) < 0.2);
}
