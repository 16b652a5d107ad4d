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

#ifndef DIMC_ENUMERATION_HPP
#define DIMC_ENUMERATION_HPP

#include "dimc/errors.hpp"
#include "dimc/linalg.hpp"
#include "dimc/models.hpp"
#include "dimc/rng.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dimc {

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

/// Full enumeration of a small model's state space.
/**
 * States are grouped into classes sharing the same sufficient statistic,
 * so c(theta) = sum_c n_c exp(theta' S_c) costs one pass over the classes.
 * Refuses (IntractableError) when the state space exceeds \p cap.
 */
template <class Model>
class Enumeration {
 public:
  using State = typename Model::State;

  explicit Enumeration(Model model, std::uint64_t cap = kDefaultEnumerationCap) : model_(std::move(model)) {
    const auto count = model_.state_count();
    if (!count || *count > cap) {
      throw IntractableError(std::string(Model::name()) + " model is intractable at this size: state space " +
                             (count ? std::to_string(*count) : std::string("> 2^62")) +
                             " exceeds the enumeration cap " + std::to_string(cap));
    }
    state_count_ = *count;
    const auto p = static_cast<Eigen::Index>(model_.dim());
    std::map<std::vector<long long>, std::size_t> index;
    std::vector<Vector> stats;
    for (std::uint64_t s = 0; s < state_count_; ++s) {
      const Vector stat = model_.suffstats(model_.decode(s));
      std::vector<long long> key(static_cast<std::size_t>(p));
      for (Eigen::Index k = 0; k < p; ++k) {
        key[static_cast<std::size_t>(k)] = std::llround(stat(k) * 1e9);
      }
      auto [it, inserted] = index.try_emplace(std::move(key), stats.size());
      if (inserted) {
        stats.push_back(stat);
        members_.emplace_back();
      }
      members_[it->second].push_back(s);
    }
    class_stats_.resize(static_cast<Eigen::Index>(stats.size()), p);
    log_multiplicity_.resize(static_cast<Eigen::Index>(stats.size()));
    for (std::size_t c = 0; c < stats.size(); ++c) {
      class_stats_.row(static_cast<Eigen::Index>(c)) = stats[c].transpose();
      log_multiplicity_(static_cast<Eigen::Index>(c)) = std::log(static_cast<double>(members_[c].size()));
    }
  }

  const Model& model() const { return model_; }
  std::uint64_t state_count() const { return state_count_; }
  std::size_t class_count() const { return members_.size(); }
  /// One row per distinct sufficient statistic.
  const Matrix& class_stats() const { return class_stats_; }
  std::size_t class_size(std::size_t c) const { return members_[c].size(); }

  double log_normalizer(const Vector& theta) const {
    const Vector lw = class_log_weights(theta);
    return log_sum_exp(std::span<const double>(lw.data(), static_cast<std::size_t>(lw.size())));
  }

  /// Probability of each sufficient-statistic class under f(.|theta).
  Vector class_probabilities(const Vector& theta) const {
    Vector lw = class_log_weights(theta);
    const double lse = log_sum_exp(std::span<const double>(lw.data(), static_cast<std::size_t>(lw.size())));
    return (lw.array() - lse).exp().matrix();
  }

  /// Probability of a single encoded state.
  double state_probability(std::uint64_t index, const Vector& theta) const {
    return std::exp(theta.dot(model_.suffstats(model_.decode(index))) - log_normalizer(theta));
  }

  Vector mean_stats(const Vector& theta) const {
    return class_stats_.transpose() * class_probabilities(theta);
  }

  Matrix cov_stats(const Vector& theta) const {
    const Vector prob = class_probabilities(theta);
    const Vector mu = class_stats_.transpose() * prob;
    const Matrix centered = class_stats_.rowwise() - mu.transpose();
    return centered.transpose() * prob.asDiagonal() * centered;
  }

  std::size_t sample_class(const Vector& theta, RngStream& rng) const {
    const Vector prob = class_probabilities(theta);
    double u = rng.uniform();
    for (Eigen::Index c = 0; c + 1 < prob.size(); ++c) {
      u -= prob(c);
      if (u < 0.0) {
        return static_cast<std::size_t>(c);
      }
    }
    return static_cast<std::size_t>(prob.size() - 1);
  }

  /// Exact draw of S(x*) with x* ~ f(.|theta).
  Vector sample_stats(const Vector& theta, RngStream& rng) const {
    return class_stats_.row(static_cast<Eigen::Index>(sample_class(theta, rng))).transpose();
  }

  /// Exact draw x* ~ f(.|theta), by inverse CDF over classes then uniform
  /// choice within the class.
  State sample_state(const Vector& theta, RngStream& rng) const {
    const auto& members = members_[sample_class(theta, rng)];
    return model_.decode(members[rng.uniform_index(members.size())]);
  }

 private:
  Vector class_log_weights(const Vector& theta) const {
    check_dimension(model_.dim(), theta, "enumeration theta");
    return class_stats_ * theta + log_multiplicity_;
  }

  Model model_;
  std::uint64_t state_count_ = 0;
  Matrix class_stats_;
  Vector log_multiplicity_;
  std::vector<std::vector<std::uint64_t>> members_;
};

/// Exact log c(theta) by enumeration.
template <class Model>
double enumerate_log_normalizer(const Model& model, const Vector& theta,
                                std::uint64_t cap = kDefaultEnumerationCap) {
  return Enumeration<Model>(model, cap).log_normalizer(theta);
}

/// One exact draw from f(.|theta). Builds the enumeration on every call;
/// hold an Enumeration for repeated draws.
template <class Model>
typename Model::State exact_sample(const Model& model, const Vector& theta, RngStream& rng,
                                   std::uint64_t cap = kDefaultEnumerationCap) {
  try {
    return Enumeration<Model>(model, cap).sample_state(theta, rng);
  } catch (const IntractableError& e) {
    throw IntractableError(std::string("exact sampling unavailable: ") + e.what());
  }
}

}  // namespace dimc

#endif  // DIMC_ENUMERATION_HPP
