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

#ifndef DIMC_PRIOR_HPP
#define DIMC_PRIOR_HPP

#include "dimc/linalg.hpp"
#include "dimc/rng.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace dimc {

/// Prior density over theta with analytic gradient and Hessian.
class Prior {
 public:
  enum class Kind { UniformBox, IndependentNormal };

  static Prior uniform_box(Vector lower, Vector upper);
  static Prior independent_normal(Vector mean, Vector sd);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return static_cast<std::size_t>(a_.size()); }

  bool in_support(const Vector& theta) const;
  /// -infinity outside the support.
  double log_density(const Vector& theta) const;
  /// Zero on the interior of a uniform box.
  Vector gradient(const Vector& theta) const;
  Matrix hessian(const Vector& theta) const;

  Vector mean() const;
  Vector sd() const;
  Vector sample(RngStream& rng) const;
  /// Marginal CDF of coordinate i.
  double marginal_cdf(std::size_t i, double value) const;

  nlohmann::json to_json() const;
  static Prior from_json(const nlohmann::json& j);

 private:
  Prior(Kind kind, Vector a, Vector b);

  Kind kind_;
  Vector a_;  // lower bound or mean
  Vector b_;  // upper bound or sd
};

}  // namespace dimc

#endif  // DIMC_PRIOR_HPP
