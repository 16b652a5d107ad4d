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

// Command-line front end: simulate, run, acd, summarize.

#include "dimc/errors.hpp"
#include "dimc/harness.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;
constexpr int kPartial = 3;

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw dimc::ConfigError("cannot read " + path);
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw dimc::ConfigError(path + ": invalid JSON (" + e.what() + ")");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian inference for models with intractable normalizing functions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string trace_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool resume = false;

  auto* simulate = app.add_subcommand("simulate", "simulate a dataset from a model at a fixed theta");
  simulate->add_option("--config", config_path, "JSON with model, theta, cycles and inner")->required();
  simulate->add_option("--out", out_path, "output data file")->required();
  simulate->add_option("--seed", seed, "random seed (default 1)");

  auto* run = app.add_subcommand("run", "run a tuning-grid experiment");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_path, "output directory (overrides the config)");
  run->add_option("--seed", seed, "seed (overrides the config)");
  run->add_option("--workers", workers, "concurrent grid entries");
  run->add_flag("--resume", resume, "continue from checkpoints in an existing output directory");

  auto* acd = app.add_subcommand("acd", "approximate curvature diagnostic for an existing trace");
  acd->add_option("--config", config_path, "experiment config giving model, data, prior and ACD settings")
      ->required();
  acd->add_option("--trace", trace_path, "trace CSV")->required();
  acd->add_option("--out", out_path, "report file (JSON); stdout if omitted");
  acd->add_option("--seed", seed, "seed (overrides the config)");
  acd->add_option("--workers", workers, "concurrent replications");

  auto* summarize = app.add_subcommand("summarize", "posterior summary and density grid of a trace");
  summarize->add_option("--trace", trace_path, "trace CSV")->required();
  summarize->add_option("--out", out_path, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*simulate) {
      dimc::simulate_dataset(read_json_file(config_path), out_path, seed.value_or(1));
      return kOk;
    }
    if (*run) {
      dimc::ExperimentConfig cfg = dimc::load_config(config_path);
      dimc::RunOverrides o;
      if (!out_path.empty()) o.out_dir = out_path;
      o.seed = seed;
      o.workers = workers;
      o.resume = resume;
      const auto result = dimc::run_experiment(std::move(cfg), o);
      std::cout << (result.dir / "summary.csv").string() << '\n';
      return result.partial ? kPartial : kOk;
    }
    if (*acd) {
      const dimc::ExperimentConfig cfg = dimc::load_config(config_path);
      const dimc::Trace trace = dimc::load_trace(trace_path);
      const auto report = dimc::acd_for_trace(cfg, trace, seed.value_or(cfg.seed), workers.value_or(1));
      const std::string text = report.to_json().dump(2);
      if (out_path.empty()) {
        std::cout << text << '\n';
      } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << text << '\n';
      }
      return kOk;
    }
    if (*summarize) {
      dimc::summarize_trace(trace_path, out_path);
      return kOk;
    }
  } catch (const dimc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}
