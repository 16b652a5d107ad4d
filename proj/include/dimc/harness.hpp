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

#ifndef DIMC_HARNESS_HPP
#define DIMC_HARNESS_HPP

#include "dimc/diagnostics.hpp"
#include "dimc/inner.hpp"
#include "dimc/models.hpp"
#include "dimc/prior.hpp"
#include "dimc/spike_slab.hpp"
#include "dimc/trace.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dimc {

enum class SamplerKind { Exchange, Dmh, Abc, Alr, Likem, SpikeSlab };

std::string_view to_string(SamplerKind kind);
/// Name of the tuning parameter the grid ranges over ("m", "epsilon", "d").
std::string_view tuning_name(SamplerKind kind);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::Dmh;
  InnerKind inner = InnerKind::GibbsSweep;
  /// Values of the tuning parameter; exchange has a single implicit entry.
  std::vector<double> grid;
  std::vector<double> proposal_scales;
  std::vector<double> init;
  bool adapt = true;
  std::uint64_t enumeration_cap = std::uint64_t{1} << 20;
  // abc
  int abc_cycles = 1;
  std::vector<double> distance_scales;
  // alr and likem
  std::size_t prerun_iterations = 2000;
  int prerun_cycles = 90;
  int inner_cycles = 1;
  std::size_t pool_cap = 100000;
  std::size_t n_aux = 10000;
  double ess_floor = 50.0;
  int gp_restarts = 5;
  // spike_slab
  bool use_likelihood = true;
  double log_tau_step = 1.0;
  double log_y_step = 1.0;
  SpikeSlabHyper hyper;
};

struct AcdConfig {
  bool enabled = true;
  std::size_t n_aux = 500;
  std::size_t replications = 30;
  std::size_t cap = 400;
  bool iid = false;
  std::size_t thin = 1;
  int pool_burn_in = 100;
  int pool_spacing = 1;
  /// Pool reference points per replication (see AcdOptions::references).
  std::size_t references = 1;
  InnerKind inner = InnerKind::GibbsSweep;
};

struct ExperimentConfig {
  ModelSpec model = PottsModel(2, 2, 2);
  std::filesystem::path data_path;
  std::optional<Prior> prior;
  SamplerConfig sampler;
  std::size_t iterations = 0;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
  AcdConfig acd;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  std::size_t workers = 0;
  std::size_t checkpoint_every = 10000;
  /// The validated configuration as JSON, data path made absolute.
  nlohmann::json normalized;
};

/// Validates a configuration object. Unknown keys and type errors throw
/// ConfigError naming the field; relative paths resolve against \p base.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base = {});
/// Parses a JSON file; syntax errors report the line.
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json model_to_json(const ModelSpec& model);
ModelSpec model_from_json(const nlohmann::json& j, const std::string& where = "model");

struct EntryResult {
  double tuning_value = 0.0;
  std::filesystem::path dir;
  std::string status = "ok";
  double acceptance_rate = 0.0;
  double wall_seconds = 0.0;
  std::optional<AcdReport> acd;
};

struct ExperimentResult {
  std::filesystem::path dir;
  std::vector<EntryResult> entries;
  bool partial = false;
};

struct RunOverrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  /// Continue entries from checkpoint.cbor and keep entries that already finished.
  bool resume = false;
};

/// One chain per grid entry (concurrently), each with trace CSV, metadata
/// and ACD report, then summary.csv. A failing entry is recorded in the
/// summary and does not stop the others.
ExperimentResult run_experiment(ExperimentConfig config, const RunOverrides& overrides = {});

/// Simulates a dataset described by {model, theta, cycles, inner} and
/// writes it in the model's ingestion format.
void simulate_dataset(const nlohmann::json& spec, const std::filesystem::path& out, std::uint64_t seed);

/// ACD for an existing trace under the model, data and prior of \p config.
AcdReport acd_for_trace(const ExperimentConfig& config, const Trace& trace, std::uint64_t seed,
                        std::size_t workers = 1);

/// Writes summary.csv (and density.csv for two-parameter traces) to \p out_dir.
void summarize_trace(const std::filesystem::path& trace_path, const std::filesystem::path& out_dir);

/// Reads a trace CSV plus its metadata sidecar (PATH.json) when present.
Trace load_trace(const std::filesystem::path& path);

void write_summary_table(const ExperimentResult& result, std::string_view tuning, const std::filesystem::path& path);

}  // namespace dimc

#endif  // DIMC_HARNESS_HPP
