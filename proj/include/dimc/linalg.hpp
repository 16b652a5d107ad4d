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

#ifndef DIMC_LINALG_HPP
#define DIMC_LINALG_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace dimc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(sum(exp(x))) without overflow; -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> x) {
  if (x.empty()) {
    return kNegInf;
  }
  const double top = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(top)) {
    return top;
  }
  double sum = 0.0;
  for (double v : x) {
    sum += std::exp(v - top);
  }
  return top + std::log(sum);
}

/// Number of entries in the half-vectorization of a p x p matrix.
constexpr std::size_t vech_size(std::size_t p) { return p * (p + 1) / 2; }

/// Half-vectorization: lower triangle stacked column by column, so a
/// 2 x 2 matrix maps to (m11, m21, m22).
inline Vector vech(const Matrix& m) {
  const auto p = static_cast<std::size_t>(m.rows());
  Vector out(static_cast<Eigen::Index>(vech_size(p)));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = j; i < m.rows(); ++i) {
      out(k++) = m(i, j);
    }
  }
  return out;
}

inline Vector to_vector(std::span<const double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = values[i];
  }
  return v;
}

inline std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace dimc

#endif  // DIMC_LINALG_HPP
