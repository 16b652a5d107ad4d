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

#ifndef DIMC_TRACE_HPP
#define DIMC_TRACE_HPP

#include "dimc/linalg.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace dimc {

/// Output of an outer sampler: one row per iteration plus run metadata.
/**
 * The first param_dim columns hold theta; samplers with latent blocks
 * (spike-and-slab) append further columns after them.
 */
struct Trace {
  std::string label;
  std::vector<std::string> columns;
  std::size_t param_dim = 0;
  std::vector<double> values;
  std::size_t accepted = 0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;
  nlohmann::json tuning = nlohmann::json::object();
  nlohmann::json diagnostics = nlohmann::json::object();

  std::size_t width() const { return columns.size(); }
  std::size_t rows() const { return columns.empty() ? 0 : values.size() / columns.size(); }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * width(), width()}; }
  void append(std::span<const double> row);

  Vector theta(std::size_t i) const;
  /// theta rows from \p from on, keeping every \p thin-th.
  Matrix thetas(std::size_t from = 0, std::size_t thin = 1) const;
  /// Retained post-burn-in theta rows.
  Matrix posterior(std::size_t thin = 1) const { return thetas(std::min(burn_in, rows()), thin); }
  double acceptance_rate() const;
  /// Mean wall time per iteration in seconds.
  double seconds_per_iteration() const;
};

std::vector<std::string> theta_columns(std::size_t p);

/// Shortest round-trip decimal form, identical across runs.
std::string format_double(double value);

void write_trace_csv(const Trace& trace, const std::filesystem::path& path);
/// Reads a trace CSV. theta columns are those named theta_*.
/// Malformed content throws std::runtime_error naming the line number.
Trace read_trace_csv(const std::filesystem::path& path);

nlohmann::json trace_metadata(const Trace& trace);
void write_trace_metadata(const Trace& trace, const std::filesystem::path& path);
/// Restores label, seed, burn-in, tuning and counters from a sidecar.
void apply_trace_metadata(Trace& trace, const nlohmann::json& meta);

/// Appends trace rows to a CSV as they are produced.
class TraceWriter {
 public:
  /// Creates the file with a header, or, when \p keep_rows is set, keeps
  /// the header and the first keep_rows data rows of an existing file.
  TraceWriter(const std::filesystem::path& path, const std::vector<std::string>& columns,
              std::size_t keep_rows = 0, bool resume = false);

  void write(std::size_t iteration, std::span<const double> row);
  void flush();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace dimc

#endif  // DIMC_TRACE_HPP
