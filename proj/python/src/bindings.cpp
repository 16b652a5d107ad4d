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
#include "dimc/harness.hpp"
#include "dimc/models.hpp"
#include "dimc/trace.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

namespace py = pybind11;
using namespace dimc;

namespace {

// JSON crosses the boundary as text; Python's json module does the rest.
py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_python(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict entry_dict(const EntryResult& e) {
  py::dict d;
  d["tuning_value"] = e.tuning_value;
  d["dir"] = e.dir.string();
  d["status"] = e.status;
  d["acceptance_rate"] = e.acceptance_rate;
  d["wall_seconds"] = e.wall_seconds;
  d["acd"] = e.acd ? to_python(e.acd->to_json()) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_dimc, m) {
  m.doc() = "Bayesian inference for models with intractable normalizing functions";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DiagnosticImpractical>(m, "DiagnosticImpractical", PyExc_RuntimeError);

  m.def(
      "potts_suffstat",
      [](const Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& grid, int colors) {
        std::vector<int> cells(grid.data(), grid.data() + grid.size());
        return potts_suffstat(PottsLattice(static_cast<int>(grid.rows()), static_cast<int>(grid.cols()), colors,
                                           std::move(cells)));
      },
      py::arg("grid"), py::arg("colors"), "Number of same-colour neighbour pairs (colours are 1-based).");

  m.def(
      "ergm_suffstats",
      [](int nodes, const std::vector<std::pair<int, int>>& edges) {
        return Vector(ergm_suffstats(UndirectedGraph(nodes, edges)));
      },
      py::arg("nodes"), py::arg("edges"), "(edge count, GWESP with decay 0.2).");

  m.def(
      "isingnet_suffstats",
      [](const Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& responses) {
        std::vector<std::uint8_t> cells(static_cast<std::size_t>(responses.size()));
        for (Eigen::Index i = 0; i < responses.size(); ++i) cells[static_cast<std::size_t>(i)] = responses.data()[i];
        return Vector(isingnet_suffstats(ItemResponseMatrix(static_cast<int>(responses.rows()),
                                                            static_cast<int>(responses.cols()), std::move(cells))));
      },
      py::arg("responses"));

  m.def("acd_threshold", &acd_threshold, py::arg("r"), "0.99 quantile of chi-square with r degrees of freedom.");
  m.def(
      "batch_means_cov", [](const Matrix& series, std::size_t b) { return batch_means_cov(series, b); },
      py::arg("series"), py::arg("batch") = 0);
  m.def(
      "acd_statistic",
      [](const Matrix& series, bool iid) { return acd_statistic(series, iid).value; }, py::arg("series"),
      py::arg("iid") = false, "n d' V^-1 d for a curvature series (rows are draws).");

  m.def(
      "load_config", [](const std::string& path) { return to_python(load_config(path).normalized); },
      py::arg("path"), "Validated configuration as a dict.");

  m.def(
      "run_experiment",
      [](const py::object& config, std::optional<std::string> out, std::optional<std::uint64_t> seed,
         std::optional<std::size_t> workers) {
        ExperimentConfig cfg =
            py::isinstance<py::dict>(config) ? parse_config(from_python(config)) : load_config(config.cast<std::string>());
        RunOverrides over;
        if (out) over.out_dir = *out;
        over.seed = seed;
        over.workers = workers;
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = run_experiment(std::move(cfg), over);
        }
        py::list entries;
        for (const auto& e : result.entries) entries.append(entry_dict(e));
        py::dict d;
        d["dir"] = result.dir.string();
        d["partial"] = result.partial;
        d["entries"] = entries;
        return d;
      },
      py::arg("config"), py::arg("out") = py::none(), py::arg("seed") = py::none(), py::arg("workers") = py::none(),
      "Runs every grid entry of a config (dict or JSON path).");

  m.def(
      "simulate",
      [](const py::dict& spec, const std::string& out, std::uint64_t seed) {
        simulate_dataset(from_python(spec), out, seed);
      },
      py::arg("spec"), py::arg("out"), py::arg("seed"));

  m.def(
      "acd",
      [](const std::string& config, const std::string& trace, std::optional<std::uint64_t> seed, std::size_t workers) {
        const ExperimentConfig cfg = load_config(config);
        const Trace t = load_trace(trace);
        AcdReport report;
        {
          py::gil_scoped_release release;
          report = acd_for_trace(cfg, t, seed.value_or(cfg.seed), workers);
        }
        return to_python(report.to_json());
      },
      py::arg("config"), py::arg("trace"), py::arg("seed") = py::none(), py::arg("workers") = 1);

  m.def(
      "summarize", [](const std::string& trace, const std::string& out) { summarize_trace(trace, out); },
      py::arg("trace"), py::arg("out"), "Writes summary.csv (and density.csv for two parameters).");

  m.def(
      "load_trace",
      [](const std::string& path) {
        const Trace t = load_trace(path);
        py::array_t<double> values({static_cast<py::ssize_t>(t.rows()), static_cast<py::ssize_t>(t.width())});
        std::copy(t.values.begin(), t.values.end(), values.mutable_data());
        py::dict d;
        d["columns"] = t.columns;
        d["values"] = values;
        d["label"] = t.label;
        d["burn_in"] = t.burn_in;
        d["acceptance_rate"] = t.acceptance_rate();
        return d;
      },
      py::arg("path"));
}
