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

#include "dimc/summary.hpp"

#include "dimc/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace dimc {

std::vector<CoordinateSummary> posterior_summary(const Trace& trace) {
  const std::size_t from = std::min(trace.burn_in, trace.rows());
  const std::size_t n = trace.rows() - from;
  if (n == 0) {
    throw std::invalid_argument("posterior_summary: trace has no rows after burn-in");
  }
  std::vector<CoordinateSummary> out;
  for (std::size_t c = 0; c < trace.width(); ++c) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = trace.values[(from + i) * trace.width() + c];
    CoordinateSummary s;
    s.name = trace.columns[c];
    double sum = 0.0;
    for (double v : col) sum += v;
    s.mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : col) ss += (v - s.mean) * (v - s.mean);
    s.sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    s.q025 = empirical_quantile(col, 0.025);
    s.q50 = empirical_quantile(col, 0.5);
    s.q975 = empirical_quantile(std::move(col), 0.975);
    out.push_back(std::move(s));
  }
  return out;
}

void write_summary_csv(const std::vector<CoordinateSummary>& summary, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "name,mean,sd,q2.5,q50,q97.5\n";
  for (const auto& s : summary) {
    out << s.name << ',' << format_double(s.mean) << ',' << format_double(s.sd) << ',' << format_double(s.q025)
        << ',' << format_double(s.q50) << ',' << format_double(s.q975) << '\n';
  }
}

namespace {

// Separable Gaussian smoothing of a binned grid along one axis.
Matrix smooth_rows(const Matrix& counts, double h_cells) {
  const auto n = counts.rows();
  const auto half = static_cast<Eigen::Index>(std::ceil(4.0 * h_cells));
  Vector kernel(2 * half + 1);
  for (Eigen::Index k = -half; k <= half; ++k) {
    const double z = static_cast<double>(k) / h_cells;
    kernel(k + half) = std::exp(-0.5 * z * z);
  }
  Matrix out = Matrix::Zero(n, counts.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = std::max<Eigen::Index>(0, i - half); k <= std::min(n - 1, i + half); ++k) {
      out.row(i) += kernel(k - i + half) * counts.row(k);
    }
  }
  return out;
}

}  // namespace

DensityGrid kde_grid(const Matrix& samples, std::size_t size) {
  if (samples.cols() != 2) {
    throw std::invalid_argument("kde_grid needs two-dimensional samples");
  }
  if (samples.rows() < 2 || size < 2) {
    throw std::invalid_argument("kde_grid needs at least 2 samples and 2 grid points");
  }
  const double n = static_cast<double>(samples.rows());
  const auto g = static_cast<Eigen::Index>(size);
  DensityGrid grid;
  Vector lo(2), step(2), h(2);
  for (Eigen::Index c = 0; c < 2; ++c) {
    const auto col = samples.col(c);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().sum() / (n - 1.0));
    const double span = col.maxCoeff() - col.minCoeff();
    h(c) = std::pow(n, -1.0 / 6.0) * (sd > 0.0 ? sd : (span > 0.0 ? span : 1.0));
    lo(c) = col.minCoeff() - 3.0 * h(c);
    step(c) = (col.maxCoeff() + 3.0 * h(c) - lo(c)) / static_cast<double>(g - 1);
  }
  grid.x = Vector::LinSpaced(g, lo(0), lo(0) + step(0) * static_cast<double>(g - 1));
  grid.y = Vector::LinSpaced(g, lo(1), lo(1) + step(1) * static_cast<double>(g - 1));

  Matrix counts = Matrix::Zero(g, g);
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const double fx = (samples(i, 0) - lo(0)) / step(0);
    const double fy = (samples(i, 1) - lo(1)) / step(1);
    const auto ix = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(fx)), 0, g - 2);
    const auto iy = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(fy)), 0, g - 2);
    const double wx = std::clamp(fx - static_cast<double>(ix), 0.0, 1.0);
    const double wy = std::clamp(fy - static_cast<double>(iy), 0.0, 1.0);
    counts(ix, iy) += (1 - wx) * (1 - wy);
    counts(ix + 1, iy) += wx * (1 - wy);
    counts(ix, iy + 1) += (1 - wx) * wy;
    counts(ix + 1, iy + 1) += wx * wy;
  }
  Matrix smoothed = smooth_rows(counts, h(0) / step(0));
  smoothed = smooth_rows(smoothed.transpose(), h(1) / step(1)).transpose();
  grid.density = smoothed / (n * 2.0 * std::numbers::pi * h(0) * h(1));
  return grid;
}

void write_density_csv(const DensityGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "theta_1,theta_2,density\n";
  for (Eigen::Index i = 0; i < grid.x.size(); ++i) {
    for (Eigen::Index j = 0; j < grid.y.size(); ++j) {
      out << format_double(grid.x(i)) << ',' << format_double(grid.y(j)) << ',' << format_double(grid.density(i, j))
          << '\n';
    }
  }
}

}  // namespace dimc
