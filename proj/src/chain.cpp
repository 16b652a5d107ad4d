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

#include "dimc/chain.hpp"

#include <chrono>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace dimc {
namespace {

void write_checkpoint(const std::filesystem::path& path, const nlohmann::json& j) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    const auto bytes = nlohmann::json::to_cbor(j);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw std::runtime_error("cannot write checkpoint " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

nlohmann::json read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read checkpoint " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return nlohmann::json::from_cbor(bytes);
}

}  // namespace

Trace run_chain(ChainSampler& sampler, const ChainOptions& options) {
  Trace trace;
  trace.label = sampler.label();
  trace.columns = sampler.columns();
  trace.param_dim = sampler.param_dim();
  trace.seed = options.seed;
  trace.burn_in = options.burn_in;
  trace.tuning = sampler.tuning();
  trace.values.reserve(options.iterations * trace.width());

  RngStream rng(options.seed, options.stream);
  std::size_t start = 0;
  double previous_wall = 0.0;

  if (options.resume) {
    if (options.checkpoint_path.empty()) {
      throw std::invalid_argument("run_chain: resume requested without a checkpoint path");
    }
    const auto ck = read_checkpoint(options.checkpoint_path);
    start = ck.at("iteration").get<std::size_t>();
    rng.set_state(ck.at("rng").get<RngStream::State>());
    trace.accepted = ck.at("accepted").get<std::size_t>();
    previous_wall = ck.at("wall_seconds").get<double>();
    sampler.load_state(ck.at("sampler"));
    if (!options.trace_path.empty()) {
      const Trace earlier = read_trace_csv(options.trace_path);
      if (earlier.rows() < start) {
        throw std::runtime_error("cannot resume: trace " + options.trace_path.string() +
                                 " has fewer rows than the checkpoint");
      }
      trace.values.assign(earlier.values.begin(),
                          earlier.values.begin() + static_cast<std::ptrdiff_t>(start * trace.width()));
    }
  }

  std::unique_ptr<TraceWriter> writer;
  if (!options.trace_path.empty()) {
    writer = std::make_unique<TraceWriter>(options.trace_path, trace.columns, start, options.resume);
  }

  std::vector<double> row(trace.width());
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return previous_wall + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  for (std::size_t it = start; it < options.iterations; ++it) {
    if (sampler.step(it, rng)) {
      ++trace.accepted;
    }
    sampler.current_row(row);
    trace.append(row);
    if (writer) {
      writer->write(it + 1, row);
    }
    const bool checkpoint_due = !options.checkpoint_path.empty() && options.checkpoint_every > 0 &&
                                (it + 1) % options.checkpoint_every == 0 && it + 1 < options.iterations;
    if (checkpoint_due) {
      if (writer) {
        writer->flush();
      }
      nlohmann::json ck;
      ck["iteration"] = it + 1;
      ck["rng"] = rng.state();
      ck["accepted"] = trace.accepted;
      ck["wall_seconds"] = elapsed();
      ck["sampler"] = sampler.save_state();
      try {
        write_checkpoint(options.checkpoint_path, ck);
      } catch (const std::exception& e) {
        throw std::runtime_error(std::string(e.what()) + " at iteration " + std::to_string(it + 1));
      }
    }
  }
  if (writer) {
    writer->flush();
  }
  trace.wall_seconds = elapsed();
  trace.diagnostics = sampler.diagnostics();
  return trace;
}

}  // namespace dimc
