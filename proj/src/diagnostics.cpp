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

#include <gsl/gsl_cdf.h>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dimc {

ScoreTerms score_terms(const Vector& s_data, const Prior& prior, const Vector& theta, const Vector& mean,
                       const Matrix& cov) {
  return {s_data - mean + prior.gradient(theta), -cov + prior.hessian(theta)};
}

ScoreTerms score_terms(const Vector& s_data, const Prior& prior, const Vector& theta, const AuxStatPool& pool) {
  const SnisMoments m = snis_moments(pool, theta);
  return score_terms(s_data, prior, theta, m.mean, m.cov);
}

Vector curvature_vector(const ScoreTerms& terms) {
  return vech(terms.u * terms.u.transpose() + terms.h);
}

Matrix curvature_series(const Matrix& thetas, const Vector& s_data, const Prior& prior, const AuxStatPool& pool,
                        double* min_ess) {
  return curvature_series(thetas, s_data, prior, std::vector<AuxStatPool>{pool},
                          std::vector<std::size_t>(static_cast<std::size_t>(thetas.rows()), 0), min_ess);
}

Matrix curvature_series(const Matrix& thetas, const Vector& s_data, const Prior& prior,
                        const std::vector<AuxStatPool>& pools, const std::vector<std::size_t>& assignment,
                        double* min_ess) {
  const auto n = thetas.rows();
  const auto p = static_cast<std::size_t>(thetas.cols());
  if (assignment.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("curvature_series: one pool assignment per sample row is required");
  }
  Matrix out(n, static_cast<Eigen::Index>(vech_size(p)));
  double lowest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t k = assignment[static_cast<std::size_t>(i)];
    if (i > 0 && k == assignment[static_cast<std::size_t>(i - 1)] && thetas.row(i) == thetas.row(i - 1)) {
      out.row(i) = out.row(i - 1);
      continue;
    }
    const Vector theta = thetas.row(i).transpose();
    const SnisMoments m = snis_moments(pools.at(k), theta);
    lowest = std::min(lowest, m.ess);
    out.row(i) = curvature_vector(score_terms(s_data, prior, theta, m.mean, m.cov)).transpose();
  }
  if (min_ess) *min_ess = lowest;
  return out;
}

ReferenceSet acd_references(const Matrix& thetas, std::size_t count) {
  const auto n = thetas.rows();
  ReferenceSet refs;
  const Vector mean = thetas.colwise().mean().transpose();
  if (count <= 1 || n < 2) {
    refs.points = mean.transpose();
    refs.assignment.assign(static_cast<std::size_t>(n), 0);
    return refs;
  }
  Vector sd = ((thetas.rowwise() - mean.transpose()).array().square().colwise().sum() / static_cast<double>(n - 1))
                  .sqrt()
                  .transpose();
  for (Eigen::Index j = 0; j < sd.size(); ++j) {
    if (!(sd(j) > 0.0)) sd(j) = 1.0;
  }
  const Matrix z = (thetas.rowwise() - mean.transpose()).array().rowwise() / sd.transpose().array();
  const Matrix centres = farthest_point_thinning(z, std::min<std::size_t>(count, static_cast<std::size_t>(n)));
  refs.points = (centres.array().rowwise() * sd.transpose().array()).rowwise() + mean.transpose().array();
  refs.assignment.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    refs.assignment[static_cast<std::size_t>(i)] = nearest_particle(centres, z.row(i).transpose());
  }
  return refs;
}

Matrix batch_means_cov(const Matrix& series, std::size_t b) {
  const auto n = static_cast<std::size_t>(series.rows());
  if (b == 0) b = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  if (b == 0 || n < 2 * b) {
    throw std::invalid_argument("batch_means_cov: need n >= 2b (n = " + std::to_string(n) +
                                ", b = " + std::to_string(b) + ")");
  }
  const std::size_t a = n / b;
  const auto r = series.cols();
  Matrix means(static_cast<Eigen::Index>(a), r);
  for (std::size_t k = 0; k < a; ++k) {
    means.row(static_cast<Eigen::Index>(k)) =
        series.middleRows(static_cast<Eigen::Index>(k * b), static_cast<Eigen::Index>(b)).colwise().mean();
  }
  const Matrix centered = means.rowwise() - means.colwise().mean();
  return static_cast<double>(b) / static_cast<double>(a - 1) * (centered.transpose() * centered);
}

Matrix second_moment_cov(const Matrix& series) {
  if (series.rows() < 1) {
    throw std::invalid_argument("second_moment_cov: empty series");
  }
  return series.transpose() * series / static_cast<double>(series.rows());
}

double acd_threshold(std::size_t r) {
  if (r < 1) {
    throw std::invalid_argument("acd_threshold: r must be positive");
  }
  return gsl_cdf_chisq_Pinv(0.99, static_cast<double>(r));
}

AcdStatistic acd_statistic(const Matrix& series, bool iid, std::size_t batch) {
  const Matrix v = iid ? second_moment_cov(series) : batch_means_cov(series, batch);
  const Vector dbar = series.colwise().mean().transpose();
  const double n = static_cast<double>(series.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(v);
  const Vector& lambda = eig.eigenvalues();
  const double top = lambda.cwiseAbs().maxCoeff();
  const double cutoff = std::max(top, 1e-300) * 1e-12 * static_cast<double>(v.rows());
  AcdStatistic out;
  const Vector proj = eig.eigenvectors().transpose() * dbar;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda(k) > cutoff) {
      out.value += proj(k) * proj(k) / lambda(k);
    } else {
      out.pseudo_inverse = true;
    }
  }
  out.value *= n;
  return out;
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("empirical_quantile: no values");
  }
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

AcdReport summarize_acd(std::vector<double> statistics, std::size_t r) {
  AcdReport report;
  report.r = r;
  report.replications = statistics.size();
  report.threshold = acd_threshold(r);
  double sum = 0.0;
  for (double s : statistics) sum += s;
  report.mean = sum / static_cast<double>(statistics.size());
  report.lo = empirical_quantile(statistics, 0.025);
  report.hi = empirical_quantile(statistics, 0.975);
  report.pass = report.mean < report.threshold;
  report.statistics = std::move(statistics);
  return report;
}

void check_acd_dimension(std::size_t p, std::size_t cap) {
  const std::size_t r = vech_size(p);
  if (r > cap) {
    throw DiagnosticImpractical("diagnostic impractical at this dimension: r = p(p+1)/2 = " + std::to_string(r) +
                                " exceeds the cap of " + std::to_string(cap));
  }
}

nlohmann::json AcdReport::to_json() const {
  return {{"statistics", statistics},
          {"mean", mean},
          {"lo", lo},
          {"hi", hi},
          {"threshold", threshold},
          {"pass", pass},
          {"N", n_aux},
          {"n", n},
          {"R", replications},
          {"r", r},
          {"iid", iid},
          {"pseudo_inverse_count", pseudo_inverse_count},
          {"references", references},
          {"min_ess", min_ess},
          {"reference", to_std(reference)}};
}

}  // namespace dimc
