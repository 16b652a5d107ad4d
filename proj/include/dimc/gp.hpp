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

#ifndef DIMC_GP_HPP
#define DIMC_GP_HPP

#include "dimc/linalg.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <stdexcept>
#include <utility>

namespace dimc {

struct GpHyperparameters {
  double signal_variance = 1.0;
  Vector length_scales;
  /// Constant prior mean (the training-target mean; not optimized).
  double mean = 0.0;
};

/// Gaussian-process regression with an anisotropic squared-exponential
/// kernel and fixed per-point noise variances. Immutable once built.
class GpSurrogate {
 public:
  GpSurrogate(Matrix inputs, Vector targets, Vector noise, GpHyperparameters hyper);

  double predict_mean(const Vector& x) const;
  /// (mean, variance) of the latent function at x.
  std::pair<double, double> predict(const Vector& x) const;

  const Matrix& inputs() const { return inputs_; }
  const Vector& targets() const { return targets_; }
  const Vector& noise() const { return noise_; }
  const GpHyperparameters& hyperparameters() const { return hyper_; }
  /// Diagonal jitter that was needed for a stable factorization.
  double jitter() const { return jitter_; }
  double log_marginal_likelihood() const { return log_ml_; }

  nlohmann::json to_json() const;
  static GpSurrogate from_json(const nlohmann::json& j);

 private:
  Vector cross_kernel(const Vector& x) const;
  void check_input_dim(const Vector& x) const {
    if (x.size() != inputs_.cols()) throw std::invalid_argument("GP prediction input has the wrong dimension");
  }

  Matrix inputs_;
  Vector targets_;
  Vector noise_;
  GpHyperparameters hyper_;
  double jitter_ = 0.0;
  double log_ml_ = 0.0;
  Eigen::LLT<Matrix> chol_;
  Vector alpha_;
};

struct GpFitOptions {
  int restarts = 5;
  std::uint64_t seed = 0;
  int max_iterations = 2000;
};

/// Maximizes the marginal likelihood over the signal variance and length
/// scales (each bounded to [1e-3, 1e3] times the input range along its
/// axis) by Nelder-Mead from several starting points.
GpSurrogate gp_fit(const Matrix& inputs, const Vector& targets, const Vector& noise,
                   const GpFitOptions& options = {});

}  // namespace dimc

#endif  // DIMC_GP_HPP
