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

#include "dimc/harness.hpp"

#include "dimc/chain.hpp"
#include "dimc/emulation.hpp"
#include "dimc/errors.hpp"
#include "dimc/io.hpp"
#include "dimc/likem.hpp"
#include "dimc/samplers.hpp"
#include "dimc/summary.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace dimc {

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Exchange:
      return "exchange";
    case SamplerKind::Dmh:
      return "dmh";
    case SamplerKind::Abc:
      return "abc";
    case SamplerKind::Alr:
      return "alr";
    case SamplerKind::Likem:
      return "likem";
    case SamplerKind::SpikeSlab:
      return "spike_slab";
  }
  return "unknown";
}

std::string_view tuning_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Dmh:
    case SamplerKind::SpikeSlab:
      return "m";
    case SamplerKind::Abc:
      return "epsilon";
    case SamplerKind::Alr:
    case SamplerKind::Likem:
      return "d";
    case SamplerKind::Exchange:
      break;
  }
  return "none";
}

namespace {

using nlohmann::json;

// A JSON object whose keys must all be consumed; reports the dotted path
// of any offending field.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      fail(path_, "expected an object");
    }
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config field '" + where + "': " + what);
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    if (!j_.contains(key)) {
      fail(at(key), "required field is missing");
    }
    used_.insert(key);
    return j_.at(key);
  }

  template <class T>
  T get(const std::string& key) {
    const json& v = raw(key);
    return convert<T>(v, at(key));
  }

  template <class T>
  T get_or(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return get<T>(key);
  }

  Fields child(const std::string& key) { return Fields(raw(key), at(key)); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) {
        fail(at(it.key()), "unknown key");
      }
    }
  }

  template <class T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(where, "expected true or false");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(where, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(where, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
          fail(where, "expected a non-negative integer");
        }
      }
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, double>) {
      return number(v, where);
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array()) fail(where, "expected an array of numbers");
      std::vector<double> out;
      for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
      return out;
    } else {
      static_assert(sizeof(T) == 0, "unsupported config type");
    }
  }

  static double number(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) {
      return std::numeric_limits<double>::infinity();
    }
    fail(where, "expected a number");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

SamplerKind parse_sampler_kind(const std::string& s, const std::string& where) {
  for (auto k : {SamplerKind::Exchange, SamplerKind::Dmh, SamplerKind::Abc, SamplerKind::Alr, SamplerKind::Likem,
                 SamplerKind::SpikeSlab}) {
    if (s == to_string(k)) return k;
  }
  Fields::fail(where, "unknown sampler '" + s + "' (expected exchange, dmh, abc, alr, likem or spike_slab)");
}

InnerKind parse_inner(const std::string& s, const std::string& where) {
  try {
    return parse_inner_kind(s);
  } catch (const std::exception& e) {
    Fields::fail(where, e.what());
  }
}

Prior parse_prior(Fields f, std::size_t dim) {
  const auto kind = f.get<std::string>("kind");
  Prior out = Prior::uniform_box(Vector::Zero(1), Vector::Ones(1));
  if (kind == "uniform") {
    const auto lo = f.get<std::vector<double>>("lower");
    const auto hi = f.get<std::vector<double>>("upper");
    if (lo.size() != dim || hi.size() != dim) {
      Fields::fail(f.at("lower"), "bounds must have length " + std::to_string(dim));
    }
    try {
      out = Prior::uniform_box(to_vector(lo), to_vector(hi));
    } catch (const std::exception& e) {
      Fields::fail(f.at("kind"), e.what());
    }
  } else if (kind == "normal") {
    const auto mean = f.get<std::vector<double>>("mean");
    const auto sd = f.get<std::vector<double>>("sd");
    if (mean.size() != dim || sd.size() != dim) {
      Fields::fail(f.at("mean"), "mean and sd must have length " + std::to_string(dim));
    }
    try {
      out = Prior::independent_normal(to_vector(mean), to_vector(sd));
    } catch (const std::exception& e) {
      Fields::fail(f.at("kind"), e.what());
    }
  } else {
    Fields::fail(f.at("kind"), "unknown prior '" + kind + "' (expected uniform or normal)");
  }
  f.finish();
  return out;
}

std::size_t model_dim(const ModelSpec& m) {
  return std::visit([](const auto& model) { return model.dim(); }, m);
}

void check_grid(SamplerKind kind, const std::vector<double>& grid, const std::string& where) {
  if (kind == SamplerKind::Exchange) {
    if (!grid.empty()) Fields::fail(where, "the exchange sampler has no tuning parameter; omit the grid");
    return;
  }
  if (grid.empty()) {
    Fields::fail(where, "empty grid");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = grid[i];
    const std::string at = where + "[" + std::to_string(i) + "]";
    const bool integral = std::isfinite(v) && v == std::floor(v);
    switch (kind) {
      case SamplerKind::Dmh:
      case SamplerKind::SpikeSlab:
        if (!integral || v < 1) Fields::fail(at, "m must be a positive integer");
        break;
      case SamplerKind::Abc:
        if (!(v >= 0)) Fields::fail(at, "epsilon must be non-negative");
        break;
      case SamplerKind::Alr:
      case SamplerKind::Likem:
        if (!integral || v < 2) Fields::fail(at, "d must be an integer of at least 2");
        break;
      case SamplerKind::Exchange:
        break;
    }
  }
}

}  // namespace

nlohmann::json model_to_json(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) -> json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PottsModel>) {
          return {{"kind", "potts"}, {"rows", m.rows()}, {"cols", m.cols()}, {"colors", m.colors()}};
        } else if constexpr (std::is_same_v<M, ErgmModel>) {
          return {{"kind", "ergm"}, {"nodes", m.nodes()}};
        } else {
          return {{"kind", "isingnet"}, {"respondents", m.respondents()}, {"items", m.items()}};
        }
      },
      model);
}

ModelSpec model_from_json(const nlohmann::json& j, const std::string& where) {
  Fields f(j, where);
  const auto kind = f.get<std::string>("kind");
  try {
    if (kind == "potts") {
      const int r = f.get<int>("rows");
      const int c = f.get<int>("cols");
      const int k = f.get<int>("colors");
      f.finish();
      return PottsModel(r, c, k);
    }
    if (kind == "ergm") {
      const int n = f.get<int>("nodes");
      f.finish();
      return ErgmModel(n);
    }
    if (kind == "isingnet") {
      const int n = f.get<int>("respondents");
      const int p = f.get<int>("items");
      f.finish();
      return IsingNetworkModel(n, p);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    Fields::fail(where, e.what());
  }
  Fields::fail(f.at("kind"), "unknown model '" + kind + "' (expected potts, ergm or isingnet)");
}

ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base) {
  Fields root(j, "");
  ExperimentConfig cfg;
  cfg.model = model_from_json(root.raw("model"), "model");
  const std::size_t dim = model_dim(cfg.model);

  cfg.data_path = root.get<std::string>("data");
  if (cfg.data_path.is_relative() && !base.empty()) cfg.data_path = base / cfg.data_path;
  cfg.data_path = std::filesystem::absolute(cfg.data_path).lexically_normal();

  {
    Fields s = root.child("sampler");
    auto& sc = cfg.sampler;
    sc.kind = parse_sampler_kind(s.get<std::string>("kind"), s.at("kind"));
    if (s.has("inner")) sc.inner = parse_inner(s.get<std::string>("inner"), s.at("inner"));
    sc.grid = s.get_or<std::vector<double>>("grid", {});
    check_grid(sc.kind, sc.grid, s.at("grid"));
    sc.proposal_scales = s.get_or<std::vector<double>>("proposal_scales", {});
    if (!sc.proposal_scales.empty() && sc.proposal_scales.size() != dim) {
      Fields::fail(s.at("proposal_scales"), "expected length " + std::to_string(dim));
    }
    for (double v : sc.proposal_scales) {
      if (!(v > 0.0)) Fields::fail(s.at("proposal_scales"), "scales must be positive");
    }
    sc.init = s.get_or<std::vector<double>>("init", {});
    if (!sc.init.empty() && sc.init.size() != dim) {
      Fields::fail(s.at("init"), "expected length " + std::to_string(dim));
    }
    sc.adapt = s.get_or("adapt", sc.adapt);
    sc.enumeration_cap = s.get_or("enumeration_cap", sc.enumeration_cap);
    sc.abc_cycles = s.get_or("abc_cycles", sc.abc_cycles);
    sc.distance_scales = s.get_or<std::vector<double>>("distance_scales", {});
    if (!sc.distance_scales.empty() && sc.distance_scales.size() != dim) {
      Fields::fail(s.at("distance_scales"), "expected length " + std::to_string(dim));
    }
    sc.prerun_iterations = s.get_or("prerun_iterations", sc.prerun_iterations);
    sc.prerun_cycles = s.get_or("prerun_cycles", sc.kind == SamplerKind::Alr ? 10 : sc.prerun_cycles);
    sc.inner_cycles = s.get_or("inner_cycles", sc.inner_cycles);
    sc.pool_cap = s.get_or("pool_cap", sc.pool_cap);
    sc.n_aux = s.get_or("N", sc.n_aux);
    sc.ess_floor = s.get_or("ess_floor", sc.ess_floor);
    sc.gp_restarts = s.get_or("gp_restarts", sc.gp_restarts);
    sc.use_likelihood = s.get_or("use_likelihood", sc.use_likelihood);
    sc.log_tau_step = s.get_or("log_tau_step", sc.log_tau_step);
    sc.log_y_step = s.get_or("log_y_step", sc.log_y_step);
    if (sc.abc_cycles < 1 || sc.prerun_cycles < 1 || sc.inner_cycles < 1) {
      Fields::fail(s.at("kind"), "cycle counts must be positive");
    }
    for (double g : sc.grid) {
      if (sc.kind == SamplerKind::Alr || sc.kind == SamplerKind::Likem) {
        if (static_cast<std::size_t>(g) > sc.prerun_iterations) {
          Fields::fail(s.at("prerun_iterations"), "pre-run is shorter than the largest particle count");
        }
      }
    }
    s.finish();
    try {
      std::visit([&](const auto& m) { validate_inner_kind(m, sc.inner); }, cfg.model);
    } catch (const std::exception& e) {
      Fields::fail("sampler.inner", e.what());
    }
    if (sc.kind == SamplerKind::SpikeSlab && !std::holds_alternative<IsingNetworkModel>(cfg.model)) {
      Fields::fail("sampler.kind", "spike_slab requires the isingnet model");
    }
    if (sc.kind == SamplerKind::Exchange) {
      const auto count = std::visit([](const auto& m) { return m.state_count(); }, cfg.model);
      if (!count || *count > sc.enumeration_cap) {
        Fields::fail("sampler.kind",
                     "exchange needs exact sampling, which is unavailable at this model size; use dmh instead");
      }
    }
  }

  if (root.has("prior")) {
    cfg.prior = parse_prior(root.child("prior"), dim);
  } else if (cfg.sampler.kind != SamplerKind::SpikeSlab) {
    Fields::fail("prior", "required field is missing");
  }
  if (!cfg.sampler.init.empty() && cfg.prior && !cfg.prior->in_support(to_vector(cfg.sampler.init))) {
    Fields::fail("sampler.init", "lies outside the prior support");
  }

  cfg.iterations = root.get<std::size_t>("iterations");
  cfg.burn_in = root.get_or("burn_in", cfg.iterations / 10);
  if (cfg.burn_in > cfg.iterations) Fields::fail("burn_in", "exceeds iterations");
  cfg.thin = root.get_or("thin", cfg.thin);
  if (cfg.thin < 1) Fields::fail("thin", "must be at least 1");
  cfg.seed = root.get<std::uint64_t>("seed");
  if (root.has("out")) {
    cfg.out_dir = root.get<std::string>("out");
    if (cfg.out_dir.is_relative() && !base.empty()) cfg.out_dir = base / cfg.out_dir;
  }
  cfg.workers = root.get_or("workers", cfg.workers);
  cfg.checkpoint_every = root.get_or("checkpoint_every", cfg.checkpoint_every);

  if (root.has("acd")) {
    Fields a = root.child("acd");
    auto& ac = cfg.acd;
    ac.enabled = a.get_or("enabled", ac.enabled);
    ac.n_aux = a.get_or("N", ac.n_aux);
    ac.replications = a.get_or("R", ac.replications);
    ac.cap = a.get_or("cap", ac.cap);
    ac.iid = a.get_or("iid", ac.iid);
    ac.thin = a.get_or("thin", ac.thin);
    ac.pool_burn_in = a.get_or("pool_burn_in", ac.pool_burn_in);
    ac.pool_spacing = a.get_or("pool_spacing", ac.pool_spacing);
    ac.references = a.get_or("references", ac.references);
    if (a.has("inner")) ac.inner = parse_inner(a.get<std::string>("inner"), a.at("inner"));
    if (ac.n_aux < 1) Fields::fail(a.at("N"), "must be at least 1");
    if (ac.replications < 1) Fields::fail(a.at("R"), "must be at least 1");
    if (ac.thin < 1) Fields::fail(a.at("thin"), "must be at least 1");
    if (ac.references < 1) Fields::fail(a.at("references"), "must be at least 1");
    if (ac.pool_spacing < 1 || ac.pool_burn_in < 0) Fields::fail(a.at("pool_spacing"), "invalid pool settings");
    a.finish();
    try {
      std::visit([&](const auto& m) { validate_inner_kind(m, ac.inner); }, cfg.model);
    } catch (const std::exception& e) {
      Fields::fail("acd.inner", e.what());
    }
  }
  root.finish();

  cfg.normalized = j;
  cfg.normalized["data"] = cfg.data_path.string();
  cfg.normalized.erase("out");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError(path.string() + ": line " + std::to_string(line) + ": invalid JSON");
  }
  return parse_config(j, std::filesystem::absolute(path).parent_path());
}

namespace {

template <class F>
decltype(auto) with_model_data(const ExperimentConfig& cfg, F&& f) {
  return std::visit(
      [&](const auto& model) -> decltype(auto) {
        using M = std::decay_t<decltype(model)>;
        typename M::State data = [&] {
          try {
            if constexpr (std::is_same_v<M, PottsModel>) {
              return read_potts_lattice(cfg.data_path, model.colors());
            } else if constexpr (std::is_same_v<M, ErgmModel>) {
              return read_edge_list(cfg.data_path, model.nodes());
            } else {
              return read_item_responses(cfg.data_path);
            }
          } catch (const std::exception& e) {
            throw ConfigError(std::string("data: ") + e.what());
          }
        }();
        try {
          model.validate(data);
        } catch (const std::exception& e) {
          throw ConfigError("data " + cfg.data_path.string() + " does not match the model: " + e.what());
        }
        return f(model, data);
      },
      cfg.model);
}

Vector initial_theta(const ExperimentConfig& cfg, std::size_t dim) {
  if (!cfg.sampler.init.empty()) return to_vector(cfg.sampler.init);
  if (cfg.prior) return cfg.prior->mean();
  return Vector::Zero(static_cast<Eigen::Index>(dim));
}

RandomWalkProposal make_proposal(const ExperimentConfig& cfg, std::size_t dim) {
  const Vector scales = cfg.sampler.proposal_scales.empty() ? Vector::Constant(static_cast<Eigen::Index>(dim), 0.1)
                                                            : to_vector(cfg.sampler.proposal_scales);
  return RandomWalkProposal::diagonal(scales, cfg.sampler.adapt ? cfg.burn_in : 0);
}

std::string entry_name(std::size_t k, std::string_view name, double value) {
  std::ostringstream s;
  s << (k < 10 ? "0" : "") << k << '_' << name;
  if (name != "none") s << '_' << format_double(value);
  return s.str();
}

template <class Model>
std::unique_ptr<ChainSampler> make_sampler(const ExperimentConfig& cfg, const Model& model,
                                           const typename Model::State& data, double value, std::size_t entry,
                                           const std::filesystem::path& dir) {
  const auto& sc = cfg.sampler;
  const std::size_t dim = model.dim();
  const Vector init = initial_theta(cfg, dim);
  switch (sc.kind) {
    case SamplerKind::Exchange:
    case SamplerKind::Dmh:
    case SamplerKind::Abc: {
      AuxSettings aux;
      aux.mode = sc.kind == SamplerKind::Exchange ? AuxMode::Exchange
                 : sc.kind == SamplerKind::Dmh    ? AuxMode::Dmh
                                                  : AuxMode::Abc;
      aux.inner = sc.inner;
      aux.m = sc.kind == SamplerKind::Dmh ? static_cast<int>(value) : sc.abc_cycles;
      if (sc.kind == SamplerKind::Abc) aux.epsilon = value;
      if (!sc.distance_scales.empty()) aux.scales = to_vector(sc.distance_scales);
      aux.enumeration_cap = sc.enumeration_cap;
      return std::make_unique<AuxiliaryVariableSampler<Model>>(model, data, *cfg.prior, make_proposal(cfg, dim), aux,
                                                               init);
    }
    case SamplerKind::Alr: {
      AuxSettings aux;
      aux.inner = sc.inner;
      aux.m = sc.prerun_cycles;
      AuxiliaryVariableSampler<Model> prerun(model, data, *cfg.prior, make_proposal(cfg, dim), aux, init);
      RngStream rng(cfg.seed, derive_stream_id(entry, 2));
      const std::size_t skip = sc.prerun_iterations / 10;
      Matrix visited(static_cast<Eigen::Index>(sc.prerun_iterations - skip), static_cast<Eigen::Index>(dim));
      for (std::size_t t = 0; t < sc.prerun_iterations; ++t) {
        prerun.step(t, rng);
        if (t >= skip) visited.row(static_cast<Eigen::Index>(t - skip)) = prerun.theta().transpose();
      }
      AlrSettings settings;
      settings.inner = sc.inner;
      settings.inner_cycles = sc.inner_cycles;
      settings.pool_cap = sc.pool_cap;
      return std::make_unique<AlrSampler<Model>>(model, data, *cfg.prior, make_proposal(cfg, dim),
                                                 farthest_point_thinning(visited, static_cast<std::size_t>(value)),
                                                 settings, init);
    }
    case SamplerKind::Likem: {
      LikemSettings settings;
      settings.particles = static_cast<std::size_t>(value);
      settings.n = sc.n_aux;
      settings.prerun_iterations = sc.prerun_iterations;
      settings.prerun_cycles = sc.prerun_cycles;
      settings.inner = sc.inner;
      settings.ess_floor = sc.ess_floor;
      settings.gp.restarts = sc.gp_restarts;
      settings.gp.seed = cfg.seed;
      RngStream rng(cfg.seed, derive_stream_id(entry, 2));
      const EmulatorSnapshot snap =
          build_emulator(model, data, *cfg.prior, make_proposal(cfg, dim), init, settings, rng);
      write_emulator_snapshot(dir / "emulator.json", snap);
      return std::make_unique<SurrogateSampler>(snap.gp, *cfg.prior, make_proposal(cfg, dim), init, snap.info);
    }
    case SamplerKind::SpikeSlab: {
      if constexpr (std::is_same_v<Model, IsingNetworkModel>) {
        SpikeSlabSettings settings;
        settings.m = static_cast<int>(value);
        settings.use_likelihood = sc.use_likelihood;
        if (!sc.proposal_scales.empty()) settings.theta_scales = to_vector(sc.proposal_scales);
        settings.adapt_until = sc.adapt ? cfg.burn_in : 0;
        settings.log_tau_step = sc.log_tau_step;
        settings.log_y_step = sc.log_y_step;
        settings.hyper = sc.hyper;
        SpikeSlabState start = spike_slab_initial_state(dim, sc.hyper);
        if (!sc.init.empty()) start.theta = to_vector(sc.init);
        return std::make_unique<SpikeSlabSampler>(model, data, settings, start);
      } else {
        throw ConfigError("spike_slab requires the isingnet model");
      }
    }
  }
  throw std::logic_error("unhandled sampler kind");
}

template <class Model>
AcdReport run_acd(const ExperimentConfig& cfg, const Model& model, const typename Model::State& data,
                  const Matrix& thetas, std::uint64_t seed, std::uint64_t stream, std::size_t workers) {
  check_acd_dimension(model.dim(), cfg.acd.cap);
  if (!cfg.prior) {
    throw std::invalid_argument("ACD needs a prior with an analytic gradient; the spike-and-slab hierarchy has none");
  }
  AcdOptions opt;
  opt.n_aux = cfg.acd.n_aux;
  opt.replications = cfg.acd.replications;
  opt.dimension_cap = cfg.acd.cap;
  opt.iid = cfg.acd.iid;
  opt.workers = workers;
  opt.pool.inner = cfg.acd.inner;
  opt.pool.burn_in = cfg.acd.pool_burn_in;
  opt.pool.spacing = cfg.acd.pool_spacing;
  opt.references = cfg.acd.references;
  return acd(thetas, model, data, *cfg.prior, opt, RngStream(seed, stream));
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << j.dump(2) << '\n';
}

template <class Model>
EntryResult run_entry(const ExperimentConfig& cfg, const Model& model, const typename Model::State& data,
                      std::size_t k, double value, const std::filesystem::path& dir, bool resume) {
  EntryResult res;
  res.tuning_value = value;
  res.dir = dir;
  std::filesystem::create_directories(dir);
  ChainOptions opt;
  opt.iterations = cfg.iterations;
  opt.burn_in = cfg.burn_in;
  opt.seed = cfg.seed;
  opt.stream = derive_stream_id(k, 0);
  opt.trace_path = dir / "trace.csv";
  opt.checkpoint_path = dir / "checkpoint.cbor";
  opt.checkpoint_every = cfg.checkpoint_every;
  const auto meta_path = dir / "trace.csv.json";
  Trace trace;
  if (resume && !std::filesystem::exists(opt.checkpoint_path) && std::filesystem::exists(meta_path)) {
    // finished in an earlier run
    trace = load_trace(opt.trace_path);
  } else {
    opt.resume = resume && std::filesystem::exists(opt.checkpoint_path);
    auto sampler = make_sampler(cfg, model, data, value, k, dir);
    trace = run_chain(*sampler, opt);
    std::filesystem::remove(opt.checkpoint_path);
    write_trace_metadata(trace, meta_path);
  }
  res.acceptance_rate = trace.acceptance_rate();
  res.wall_seconds = trace.wall_seconds;
  if (cfg.acd.enabled && trace.rows() > 0) {
    const Matrix thetas = trace.posterior(cfg.acd.thin);
    AcdReport report = run_acd(cfg, model, data, thetas, cfg.seed, derive_stream_id(k, 1), 1);
    json j = report.to_json();
    j["tuning"] = {{"name", std::string(tuning_name(cfg.sampler.kind))}, {"value", value}};
    j["sampler"] = std::string(to_string(cfg.sampler.kind));
    write_json(dir / "acd.json", j);
    res.acd = std::move(report);
  }
  return res;
}

std::string csv_number(double v) { return format_double(v); }

}  // namespace

void write_summary_table(const ExperimentResult& result, std::string_view tuning, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "tuning_name,tuning_value,mean,lo,hi,threshold,pass,acceptance_rate,wall_seconds,status\n";
  for (const auto& e : result.entries) {
    out << tuning << ',' << csv_number(e.tuning_value) << ',';
    if (e.acd) {
      out << csv_number(e.acd->mean) << ',' << csv_number(e.acd->lo) << ',' << csv_number(e.acd->hi) << ','
          << csv_number(e.acd->threshold) << ',' << (e.acd->pass ? "true" : "false") << ',';
    } else {
      out << ",,,,,";
    }
    std::string status = e.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << csv_number(e.acceptance_rate) << ',' << csv_number(e.wall_seconds) << ',' << status << '\n';
  }
}

ExperimentResult run_experiment(ExperimentConfig cfg, const RunOverrides& overrides) {
  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.workers) cfg.workers = *overrides.workers;
  if (cfg.out_dir.empty()) {
    throw ConfigError("no output directory: set 'out' in the config or pass --out");
  }
  std::vector<double> grid = cfg.sampler.grid;
  if (cfg.sampler.kind == SamplerKind::Exchange) grid = {0.0};
  if (grid.empty()) {
    throw ConfigError("config field 'sampler.grid': empty grid");
  }

  return with_model_data(cfg, [&](const auto& model, const auto& data) {
    ExperimentResult result;
    result.dir = cfg.out_dir;
    std::filesystem::create_directories(cfg.out_dir);
    json stored = cfg.normalized;
    stored["seed"] = cfg.seed;
    write_json(cfg.out_dir / "config.json", stored);

    const std::string_view name = tuning_name(cfg.sampler.kind);
    result.entries.resize(grid.size());
    std::size_t workers = cfg.workers > 0 ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, grid.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto work = [&] {
      for (std::size_t k = next++; k < grid.size(); k = next++) {
        const auto dir = cfg.out_dir / entry_name(k, name, grid[k]);
        try {
          result.entries[k] = run_entry(cfg, model, data, k, grid[k], dir, overrides.resume);
        } catch (const std::exception& e) {
          result.entries[k].tuning_value = grid[k];
          result.entries[k].dir = dir;
          result.entries[k].status = std::string("failed: ") + e.what();
        }
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << "[" << (k + 1) << "/" << grid.size() << "] " << name << " = " << format_double(grid[k]) << ": "
                  << result.entries[k].status << '\n';
      }
    };
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> threads;
      for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
      for (auto& t : threads) t.join();
    }
    for (const auto& e : result.entries) {
      if (e.status != "ok") result.partial = true;
    }
    write_summary_table(result, name, cfg.out_dir / "summary.csv");
    return result;
  });
}

void simulate_dataset(const nlohmann::json& spec, const std::filesystem::path& out, std::uint64_t seed) {
  Fields f(spec, "");
  const ModelSpec model = model_from_json(f.raw("model"), "model");
  const auto theta = f.get<std::vector<double>>("theta");
  const auto cycles = f.get<int>("cycles");
  InnerKind inner = InnerKind::GibbsSweep;
  if (f.has("inner")) inner = parse_inner(f.get<std::string>("inner"), "inner");
  f.finish();
  if (cycles < 0) Fields::fail("cycles", "must be non-negative");
  std::visit(
      [&](const auto& m) {
        if (theta.size() != m.dim()) Fields::fail("theta", "expected length " + std::to_string(m.dim()));
        try {
          validate_inner_kind(m, inner);
        } catch (const std::exception& e) {
          Fields::fail("inner", e.what());
        }
        InnerSamplerConfig config{inner, cycles, seed};
        const auto state = simulate(m, to_vector(theta), config, m.initial_state());
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PottsModel>) {
          write_potts_lattice(state, out);
        } else if constexpr (std::is_same_v<M, ErgmModel>) {
          write_edge_list(state, out);
        } else {
          write_item_responses(state, out);
        }
      },
      model);
}

AcdReport acd_for_trace(const ExperimentConfig& config, const Trace& trace, std::uint64_t seed, std::size_t workers) {
  if (trace.param_dim != model_dim(config.model)) {
    throw DimensionMismatch("trace has " + std::to_string(trace.param_dim) + " theta columns but the model has " +
                            std::to_string(model_dim(config.model)) + " parameters");
  }
  const Matrix thetas = trace.posterior(config.acd.thin);
  return with_model_data(config, [&](const auto& model, const auto& data) {
    return run_acd(config, model, data, thetas, seed, derive_stream_id(0, 1), workers);
  });
}

Trace load_trace(const std::filesystem::path& path) {
  Trace trace = read_trace_csv(path);
  const auto meta = std::filesystem::path(path.string() + ".json");
  if (std::filesystem::exists(meta)) {
    std::ifstream in(meta);
    apply_trace_metadata(trace, json::parse(in));
  }
  return trace;
}

void summarize_trace(const std::filesystem::path& trace_path, const std::filesystem::path& out_dir) {
  const Trace trace = load_trace(trace_path);
  std::filesystem::create_directories(out_dir);
  write_summary_csv(posterior_summary(trace), out_dir / "summary.csv");
  if (trace.param_dim == 2) {
    write_density_csv(kde_grid(trace.posterior()), out_dir / "density.csv");
  }
}

}  // namespace dimc
