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

#include "dimc/gp.hpp"

#include "dimc/errors.hpp"
#include "dimc/rng.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dimc {
namespace {

constexpr double kMaxJitterFraction = 1e-2;

Matrix kernel_matrix(const Matrix& x, double signal, const Vector& length) {
  const Matrix scaled = x * length.cwiseInverse().asDiagonal();
  const Vector sq = scaled.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * scaled * scaled.transpose()).colwise() + sq;
  d2.rowwise() += sq.transpose();
  return signal * (-0.5 * d2.array().max(0.0)).exp().matrix();
}

struct Factorization {
  Eigen::LLT<Matrix> llt;
  double jitter = 0.0;
  bool ok = false;
};

// Cholesky of K + diag(noise), escalating a diagonal jitter on failure.
Factorization factorize(const Matrix& k, const Vector& noise, double signal) {
  Factorization f;
  Matrix a = k;
  a.diagonal() += noise;
  double jitter = 0.0;
  for (;;) {
    Matrix b = a;
    b.diagonal().array() += jitter;
    f.llt.compute(b);
    if (f.llt.info() == Eigen::Success && f.llt.rcond() > 1e-15) {
      f.jitter = jitter;
      f.ok = true;
      return f;
    }
    jitter = jitter == 0.0 ? 1e-12 * signal : jitter * 10.0;
    if (jitter > kMaxJitterFraction * signal) {
      return f;
    }
  }
}

double neg_log_ml(const Matrix& x, const Vector& centered, const Vector& noise, double signal,
                  const Vector& length, Factorization* keep = nullptr) {
  Factorization f = factorize(kernel_matrix(x, signal, length), noise, signal);
  if (!f.ok) {
    return std::numeric_limits<double>::infinity();
  }
  const Vector alpha = f.llt.solve(centered);
  const double logdet = 2.0 * f.llt.matrixLLT().diagonal().array().log().sum();
  const double n = static_cast<double>(centered.size());
  const double value = 0.5 * centered.dot(alpha) + 0.5 * logdet + 0.5 * n * std::log(2.0 * std::numbers::pi);
  if (keep) *keep = std::move(f);
  return value;
}

struct Objective {
  const Matrix* x;
  const Vector* centered;
  const Vector* noise;
  Vector range;
};

constexpr double kLogLo = -6.907755278982137;  // log 1e-3
constexpr double kLogSpan = 13.815510557964274;  // log 1e6
constexpr double kMaxLogSignal = 40.0;

Vector lengths_from(const gsl_vector* v, const Vector& range) {
  Vector length(range.size());
  for (Eigen::Index k = 0; k < range.size(); ++k) {
    const double z = gsl_vector_get(v, static_cast<std::size_t>(k) + 1);
    const double s = 1.0 / (1.0 + std::exp(-z));
    length(k) = range(k) * std::exp(kLogLo + kLogSpan * s);
  }
  return length;
}

double signal_from(const gsl_vector* v) {
  return std::exp(std::clamp(gsl_vector_get(v, 0), -kMaxLogSignal, kMaxLogSignal));
}

double objective(const gsl_vector* v, void* params) {
  const auto* o = static_cast<const Objective*>(params);
  const double value = neg_log_ml(*o->x, *o->centered, *o->noise, signal_from(v), lengths_from(v, o->range));
  return std::isfinite(value) ? value : 1e300;
}

double logit_for(double length, double range) {
  const double s = (std::log(length / range) - kLogLo) / kLogSpan;
  const double c = std::clamp(s, 1e-6, 1.0 - 1e-6);
  return std::log(c / (1.0 - c));
}

}  // namespace

GpSurrogate::GpSurrogate(Matrix inputs, Vector targets, Vector noise, GpHyperparameters hyper)
    : inputs_(std::move(inputs)), targets_(std::move(targets)), noise_(std::move(noise)), hyper_(std::move(hyper)) {
  if (targets_.size() != inputs_.rows() || noise_.size() != inputs_.rows()) {
    throw DimensionMismatch("GP inputs, targets and noise must have matching lengths");
  }
  if (hyper_.length_scales.size() != inputs_.cols()) {
    throw DimensionMismatch("GP length scales must match the input dimension");
  }
  if ((noise_.array() < 0.0).any()) {
    throw std::invalid_argument("GP noise variances must be non-negative");
  }
  Factorization f;
  const Vector centered = targets_.array() - hyper_.mean;
  const double nll = neg_log_ml(inputs_, centered, noise_, hyper_.signal_variance, hyper_.length_scales, &f);
  if (!std::isfinite(nll)) {
    throw NotPositiveDefinite("GP kernel matrix is not positive definite even with maximal jitter");
  }
  log_ml_ = -nll;
  jitter_ = f.jitter;
  chol_ = std::move(f.llt);
  alpha_ = chol_.solve(centered);
}

Vector GpSurrogate::cross_kernel(const Vector& x) const {
  const Matrix diff = (inputs_.rowwise() - x.transpose()) * hyper_.length_scales.cwiseInverse().asDiagonal();
  return hyper_.signal_variance * (-0.5 * diff.rowwise().squaredNorm().array()).exp().matrix();
}

double GpSurrogate::predict_mean(const Vector& x) const {
  check_input_dim(x);
  return hyper_.mean + cross_kernel(x).dot(alpha_);
}

std::pair<double, double> GpSurrogate::predict(const Vector& x) const {
  check_input_dim(x);
  const Vector k = cross_kernel(x);
  const Vector v = chol_.matrixL().solve(k);
  return {hyper_.mean + k.dot(alpha_), std::max(0.0, hyper_.signal_variance - v.squaredNorm())};
}

nlohmann::json GpSurrogate::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < inputs_.rows(); ++i) rows.push_back(to_std(inputs_.row(i).transpose()));
  return {{"inputs", rows},
          {"targets", to_std(targets_)},
          {"noise", to_std(noise_)},
          {"signal_variance", hyper_.signal_variance},
          {"length_scales", to_std(hyper_.length_scales)},
          {"mean", hyper_.mean},
          {"jitter", jitter_},
          {"log_marginal_likelihood", log_ml_}};
}

GpSurrogate GpSurrogate::from_json(const nlohmann::json& j) {
  const auto rows = j.at("inputs").get<std::vector<std::vector<double>>>();
  const auto targets = j.at("targets").get<std::vector<double>>();
  if (rows.empty()) {
    throw std::invalid_argument("GP snapshot has no inputs");
  }
  Matrix inputs(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw DimensionMismatch("GP snapshot input rows have different lengths");
    }
    inputs.row(static_cast<Eigen::Index>(i)) = to_vector(rows[i]).transpose();
  }
  GpHyperparameters hyper;
  hyper.signal_variance = j.at("signal_variance").get<double>();
  hyper.length_scales = to_vector(j.at("length_scales").get<std::vector<double>>());
  hyper.mean = j.at("mean").get<double>();
  return GpSurrogate(std::move(inputs), to_vector(targets), to_vector(j.at("noise").get<std::vector<double>>()),
                     std::move(hyper));
}

GpSurrogate gp_fit(const Matrix& inputs, const Vector& targets, const Vector& noise, const GpFitOptions& options) {
  const auto n = inputs.rows();
  const auto p = inputs.cols();
  if (n < 2) {
    throw std::invalid_argument("gp_fit needs at least 2 training points, got " + std::to_string(n));
  }
  if (targets.size() != n || noise.size() != n) {
    throw DimensionMismatch("gp_fit: inputs, targets and noise must have matching lengths");
  }
  GpHyperparameters hyper;
  hyper.mean = targets.mean();
  const Vector centered = targets.array() - hyper.mean;
  Vector range = inputs.colwise().maxCoeff() - inputs.colwise().minCoeff();
  for (Eigen::Index k = 0; k < p; ++k) {
    if (!(range(k) > 0.0)) range(k) = 1.0;
  }
  const double var = centered.squaredNorm() / static_cast<double>(n);
  const double signal0 = var > 0.0 ? var : 1.0;

  Objective obj{&inputs, &centered, &noise, range};
  gsl_multimin_function fn{&objective, static_cast<std::size_t>(p) + 1, &obj};
  gsl_vector* x = gsl_vector_alloc(static_cast<std::size_t>(p) + 1);
  gsl_vector* step = gsl_vector_alloc(static_cast<std::size_t>(p) + 1);
  gsl_vector_set_all(step, 1.0);
  gsl_multimin_fminimizer* m =
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, static_cast<std::size_t>(p) + 1);

  RngStream rng(options.seed, 0x67705f666974ULL);
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> best(static_cast<std::size_t>(p) + 1, 0.0);
  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    gsl_vector_set(x, 0, std::log(signal0) + (r == 0 ? 0.0 : rng.normal()));
    for (Eigen::Index k = 0; k < p; ++k) {
      const double frac = r == 0 ? 0.3 : std::exp(std::log(0.3) + 1.5 * rng.normal());
      gsl_vector_set(x, static_cast<std::size_t>(k) + 1, logit_for(frac * range(k), range(k)));
    }
    gsl_multimin_fminimizer_set(m, &fn, x, step);
    for (int it = 0; it < options.max_iterations; ++it) {
      if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), 1e-7) == GSL_SUCCESS) break;
    }
    if (m->fval < best_value) {
      best_value = m->fval;
      for (std::size_t i = 0; i < best.size(); ++i) best[i] = gsl_vector_get(m->x, i);
    }
  }
  for (std::size_t i = 0; i < best.size(); ++i) gsl_vector_set(x, i, best[i]);
  hyper.signal_variance = signal_from(x);
  hyper.length_scales = lengths_from(x, range);
  gsl_multimin_fminimizer_free(m);
  gsl_vector_free(step);
  gsl_vector_free(x);
  if (!(best_value < 1e300)) {
    throw NotPositiveDefinite("gp_fit: kernel matrix is not positive definite for any tried hyperparameters");
  }
  return GpSurrogate(inputs, targets, noise, std::move(hyper));
}

}  // namespace dimc
