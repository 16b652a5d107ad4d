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

#include "dimc/prior.hpp"

#include "dimc/errors.hpp"
#include "dimc/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dimc {

Prior::Prior(Kind kind, Vector a, Vector b) : kind_(kind), a_(std::move(a)), b_(std::move(b)) {
  if (a_.size() != b_.size() || a_.size() == 0) {
    throw DimensionMismatch("Prior: parameter vectors must be non-empty and of equal length");
  }
}

Prior Prior::uniform_box(Vector lower, Vector upper) {
  Prior prior(Kind::UniformBox, std::move(lower), std::move(upper));
  for (Eigen::Index i = 0; i < prior.a_.size(); ++i) {
    if (!(prior.a_(i) < prior.b_(i))) {
      throw std::invalid_argument("Prior: uniform box needs lower < upper in every coordinate");
    }
  }
  return prior;
}

Prior Prior::independent_normal(Vector mean, Vector sd) {
  Prior prior(Kind::IndependentNormal, std::move(mean), std::move(sd));
  if ((prior.b_.array() <= 0.0).any()) {
    throw std::invalid_argument("Prior: normal scales must be positive");
  }
  return prior;
}

bool Prior::in_support(const Vector& theta) const {
  if (kind_ == Kind::IndependentNormal) {
    return theta.allFinite();
  }
  return ((theta.array() > a_.array()) && (theta.array() < b_.array())).all();
}

double Prior::log_density(const Vector& theta) const {
  check_dimension(dim(), theta, "prior theta");
  if (!in_support(theta)) {
    return kNegInf;
  }
  if (kind_ == Kind::UniformBox) {
    return -(b_ - a_).array().log().sum();
  }
  const auto z = (theta - a_).array() / b_.array();
  return -0.5 * z.square().sum() - b_.array().log().sum() -
         0.5 * static_cast<double>(dim()) * std::log(2.0 * std::numbers::pi);
}

Vector Prior::gradient(const Vector& theta) const {
  check_dimension(dim(), theta, "prior theta");
  if (kind_ == Kind::UniformBox) {
    return Vector::Zero(a_.size());
  }
  return (-(theta - a_).array() / b_.array().square()).matrix();
}

Matrix Prior::hessian(const Vector& theta) const {
  check_dimension(dim(), theta, "prior theta");
  if (kind_ == Kind::UniformBox) {
    return Matrix::Zero(a_.size(), a_.size());
  }
  return (-b_.array().square().inverse()).matrix().asDiagonal();
}

Vector Prior::mean() const {
  return kind_ == Kind::UniformBox ? Vector(0.5 * (a_ + b_)) : a_;
}

Vector Prior::sd() const {
  return kind_ == Kind::UniformBox ? Vector((b_ - a_) / std::sqrt(12.0)) : b_;
}

Vector Prior::sample(RngStream& rng) const {
  Vector out(a_.size());
  for (Eigen::Index i = 0; i < a_.size(); ++i) {
    out(i) = kind_ == Kind::UniformBox ? a_(i) + (b_(i) - a_(i)) * rng.uniform_open()
                                       : a_(i) + b_(i) * rng.normal();
  }
  return out;
}

double Prior::marginal_cdf(std::size_t i, double value) const {
  const auto k = static_cast<Eigen::Index>(i);
  if (kind_ == Kind::UniformBox) {
    return std::clamp((value - a_(k)) / (b_(k) - a_(k)), 0.0, 1.0);
  }
  return 0.5 * std::erfc(-(value - a_(k)) / (b_(k) * std::numbers::sqrt2));
}

nlohmann::json Prior::to_json() const {
  if (kind_ == Kind::UniformBox) {
    return {{"kind", "uniform"}, {"lower", to_std(a_)}, {"upper", to_std(b_)}};
  }
  return {{"kind", "normal"}, {"mean", to_std(a_)}, {"sd", to_std(b_)}};
}

Prior Prior::from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "uniform") {
    return uniform_box(to_vector(j.at("lower").get<std::vector<double>>()),
                       to_vector(j.at("upper").get<std::vector<double>>()));
  }
  if (kind == "normal") {
    return independent_normal(to_vector(j.at("mean").get<std::vector<double>>()),
                              to_vector(j.at("sd").get<std::vector<double>>()));
  }
  throw std::invalid_argument("unknown prior kind '" + kind + "'");
}

}  // namespace dimc
