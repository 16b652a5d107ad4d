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

#include "dimc/trace.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace dimc {

void Trace::append(std::span<const double> r) {
  if (r.size() != width()) {
    throw std::invalid_argument("Trace::append: row width mismatch");
  }
  values.insert(values.end(), r.begin(), r.end());
}

Vector Trace::theta(std::size_t i) const {
  Vector v(static_cast<Eigen::Index>(param_dim));
  const auto r = row(i);
  for (std::size_t k = 0; k < param_dim; ++k) {
    v(static_cast<Eigen::Index>(k)) = r[k];
  }
  return v;
}

Matrix Trace::thetas(std::size_t from, std::size_t thin) const {
  thin = std::max<std::size_t>(thin, 1);
  const std::size_t n = from >= rows() ? 0 : (rows() - from + thin - 1) / thin;
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(param_dim));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = row(from + i * thin);
    for (std::size_t k = 0; k < param_dim; ++k) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = r[k];
    }
  }
  return out;
}

double Trace::acceptance_rate() const {
  return rows() == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(rows());
}

double Trace::seconds_per_iteration() const {
  return rows() == 0 ? 0.0 : wall_seconds / static_cast<double>(rows());
}

std::vector<std::string> theta_columns(std::size_t p) {
  std::vector<std::string> names;
  for (std::size_t k = 1; k <= p; ++k) {
    names.push_back("theta_" + std::to_string(k));
  }
  return names;
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace {

void write_header(std::ostream& out, const std::vector<std::string>& columns) {
  out << "iter";
  for (const auto& c : columns) {
    out << ',' << c;
  }
  out << '\n';
}

void write_row(std::ostream& out, std::size_t iteration, std::span<const double> row) {
  out << iteration;
  for (double v : row) {
    out << ',' << format_double(v);
  }
  out << '\n';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

}  // namespace

void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write trace to " + path.string());
  }
  write_header(out, trace.columns);
  for (std::size_t i = 0; i < trace.rows(); ++i) {
    write_row(out, i + 1, trace.row(i));
  }
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open trace " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path.string() + ": line 1: missing header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv(line);
  if (header.empty() || header.front() != "iter") {
    throw std::runtime_error(path.string() + ": line 1: header must start with 'iter'");
  }
  Trace trace;
  trace.columns.assign(header.begin() + 1, header.end());
  for (const auto& c : trace.columns) {
    if (c.rfind("theta_", 0) == 0) {
      ++trace.param_dim;
    }
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      continue;
    }
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t k = 1; k < fields.size(); ++k) {
      double v = 0.0;
      const auto& f = fields[k];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) + ": field '" +
                                 header[k] + "' is not a number: '" + f + "'");
      }
      trace.values.push_back(v);
    }
  }
  return trace;
}

nlohmann::json trace_metadata(const Trace& trace) {
  nlohmann::json j;
  j["sampler"] = trace.label;
  j["tuning"] = trace.tuning;
  j["seed"] = trace.seed;
  j["iterations"] = trace.rows();
  j["burn_in"] = trace.burn_in;
  j["param_dim"] = trace.param_dim;
  j["accepted"] = trace.accepted;
  j["acceptance_rate"] = trace.acceptance_rate();
  j["wall_seconds"] = trace.wall_seconds;
  j["seconds_per_iteration"] = trace.seconds_per_iteration();
  j["diagnostics"] = trace.diagnostics;
  return j;
}

void write_trace_metadata(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write metadata to " + path.string());
  }
  out << trace_metadata(trace).dump(2) << '\n';
}

void apply_trace_metadata(Trace& trace, const nlohmann::json& meta) {
  trace.label = meta.value("sampler", trace.label);
  trace.tuning = meta.value("tuning", nlohmann::json::object());
  trace.seed = meta.value("seed", std::uint64_t{0});
  trace.burn_in = meta.value("burn_in", std::size_t{0});
  trace.accepted = meta.value("accepted", std::size_t{0});
  trace.wall_seconds = meta.value("wall_seconds", 0.0);
  trace.diagnostics = meta.value("diagnostics", nlohmann::json::object());
}

TraceWriter::TraceWriter(const std::filesystem::path& path, const std::vector<std::string>& columns,
                         std::size_t keep_rows, bool resume)
    : path_(path) {
  if (resume) {
    std::ifstream in(path);
    if (!in) {
      throw std::runtime_error("cannot resume: trace " + path.string() + " is missing");
    }
    std::vector<std::string> kept;
    std::string line;
    for (std::size_t i = 0; i < keep_rows + 1 && std::getline(in, line); ++i) {
      kept.push_back(line);
    }
    if (kept.size() != keep_rows + 1) {
      throw std::runtime_error("cannot resume: trace " + path.string() + " has fewer rows than the checkpoint");
    }
    in.close();
    out_.open(path, std::ios::trunc);
    for (const auto& l : kept) {
      out_ << l << '\n';
    }
  } else {
    out_.open(path, std::ios::trunc);
    if (out_) {
      write_header(out_, columns);
    }
  }
  if (!out_) {
    throw std::runtime_error("cannot write trace to " + path.string());
  }
}

void TraceWriter::write(std::size_t iteration, std::span<const double> row) {
  write_row(out_, iteration, row);
  if (!out_) {
    throw std::runtime_error("write to " + path_.string() + " failed at iteration " + std::to_string(iteration));
  }
}

void TraceWriter::flush() {
  out_.flush();
  if (!out_) {
    throw std::runtime_error("flush of " + path_.string() + " failed");
  }
}

}  // namespace dimc
