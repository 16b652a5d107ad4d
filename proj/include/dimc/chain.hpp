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

#ifndef DIMC_CHAIN_HPP
#define DIMC_CHAIN_HPP

#include "dimc/rng.hpp"
#include "dimc/trace.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dimc {

/// A Markov chain over theta (and possibly latent blocks) driven one
/// iteration at a time by run_chain.
class ChainSampler {
 public:
  virtual ~ChainSampler() = default;

  virtual std::string label() const = 0;
  virtual std::size_t param_dim() const = 0;
  virtual std::vector<std::string> columns() const { return theta_columns(param_dim()); }

  /// Advances one iteration. Returns whether the theta move was accepted.
  virtual bool step(std::size_t iteration, RngStream& rng) = 0;
  virtual void current_row(std::span<double> out) const = 0;

  virtual nlohmann::json tuning() const = 0;
  virtual nlohmann::json diagnostics() const { return nlohmann::json::object(); }

  /// Everything besides the RNG needed to continue bit-identically.
  virtual nlohmann::json save_state() const = 0;
  virtual void load_state(const nlohmann::json& state) = 0;
};

struct ChainOptions {
  std::size_t iterations = 0;
  std::size_t burn_in = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  /// Empty: keep the trace in memory only.
  std::filesystem::path trace_path;
  /// Empty: no checkpoints.
  std::filesystem::path checkpoint_path;
  std::size_t checkpoint_every = 10000;
  /// Continue from checkpoint_path, truncating trace_path to match.
  bool resume = false;
};

/// Runs \p options.iterations steps, recording every state. The trace CSV
/// (if requested) is written incrementally; I/O failures name the
/// iteration at which they happened.
Trace run_chain(ChainSampler& sampler, const ChainOptions& options);

}  // namespace dimc

#endif  // DIMC_CHAIN_HPP
