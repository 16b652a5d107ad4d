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

#ifndef DIMC_SUMMARY_HPP
#define DIMC_SUMMARY_HPP

#include "dimc/linalg.hpp"
#include "dimc/trace.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dimc {

struct CoordinateSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
};

/// Per-column summaries of the post-burn-in rows.
std::vector<CoordinateSummary> posterior_summary(const Trace& trace);
void write_summary_csv(const std::vector<CoordinateSummary>& summary, const std::filesystem::path& path);

struct DensityGrid {
  Vector x;
  Vector y;
  Matrix density;  ///< density(i, j) at (x(i), y(j))
};

/// Gaussian kernel density estimate on a size x size grid spanning the
/// sample plus three bandwidths; Scott's rule per axis, linear binning.
DensityGrid kde_grid(const Matrix& samples, std::size_t size = 100);
/// Long format: theta_1,theta_2,density with theta_2 varying fastest.
void write_density_csv(const DensityGrid& grid, const std::filesystem::path& path);

}  // namespace dimc

#endif  // DIMC_SUMMARY_HPP
