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

#include "dimc/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dimc {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

std::string strip_comment(std::string line) {
  if (const auto pos = line.find('#'); pos != std::string::npos) {
    line.erase(pos);
  }
  return line;
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw std::runtime_error(path.string() + ": line " + std::to_string(line) + ": " + what);
}

}  // namespace

PottsLattice read_potts_lattice(const std::filesystem::path& path, std::optional<int> colors) {
  auto in = open_input(path);
  std::vector<int> cells;
  int cols = -1;
  int rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(strip_comment(line));
    std::vector<int> row;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        row.push_back(std::stoi(token, &used));
        if (used != token.size()) {
          throw std::invalid_argument(token);
        }
      } catch (const std::exception&) {
        fail(path, line_no, "'" + token + "' is not an integer");
      }
    }
    if (row.empty()) {
      continue;
    }
    if (cols >= 0 && static_cast<int>(row.size()) != cols) {
      fail(path, line_no, "expected " + std::to_string(cols) + " values, got " + std::to_string(row.size()));
    }
    cols = static_cast<int>(row.size());
    ++rows;
    cells.insert(cells.end(), row.begin(), row.end());
  }
  if (rows == 0) {
    throw std::runtime_error(path.string() + ": empty lattice");
  }
  const int k = colors.value_or(*std::max_element(cells.begin(), cells.end()));
  return PottsLattice(rows, cols, k, std::move(cells));
}

void write_potts_lattice(const PottsLattice& x, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < x.cols(); ++c) {
      out << (c ? " " : "") << x(r, c);
    }
    out << '\n';
  }
}

UndirectedGraph read_edge_list(const std::filesystem::path& path, std::optional<int> nodes) {
  auto in = open_input(path);
  std::vector<std::pair<int, int>> edges;
  std::string line;
  std::size_t line_no = 0;
  int largest = -1;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(strip_comment(line));
    std::string a;
    std::string b;
    std::string extra;
    if (!(fields >> a)) {
      continue;
    }
    if (!(fields >> b) || (fields >> extra)) {
      fail(path, line_no, "expected exactly two node indices");
    }
    int i = 0;
    int j = 0;
    try {
      i = std::stoi(a);
      j = std::stoi(b);
    } catch (const std::exception&) {
      fail(path, line_no, "node indices must be integers");
    }
    if (i < 0 || j < 0) {
      fail(path, line_no, "node indices must be non-negative");
    }
    if (i == j) {
      fail(path, line_no, "self-loop at node " + std::to_string(i));
    }
    largest = std::max({largest, i, j});
    edges.emplace_back(i, j);
  }
  const int n = nodes.value_or(largest + 1);
  if (largest >= n) {
    throw std::runtime_error(path.string() + ": node index " + std::to_string(largest) + " exceeds node count " +
                             std::to_string(n));
  }
  return UndirectedGraph(n, edges);
}

void write_edge_list(const UndirectedGraph& g, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "# nodes " << g.nodes() << '\n';
  for (const auto& [i, j] : g.edges()) {
    out << i << ' ' << j << '\n';
  }
}

ItemResponseMatrix read_item_responses(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::uint8_t> entries;
  int items = -1;
  int respondents = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    std::istringstream fields(line);
    std::string field;
    int count = 0;
    while (std::getline(fields, field, ',')) {
      field.erase(0, field.find_first_not_of(" \t"));
      field.erase(field.find_last_not_of(" \t") + 1);
      if (field != "0" && field != "1") {
        fail(path, line_no, "entry '" + field + "' is not 0 or 1");
      }
      entries.push_back(field == "1" ? 1 : 0);
      ++count;
    }
    if (items >= 0 && count != items) {
      fail(path, line_no, "expected " + std::to_string(items) + " items, got " + std::to_string(count));
    }
    items = count;
    ++respondents;
  }
  if (respondents == 0) {
    throw std::runtime_error(path.string() + ": no responses");
  }
  return ItemResponseMatrix(respondents, items, std::move(entries));
}

void write_item_responses(const ItemResponseMatrix& x, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (int i = 0; i < x.respondents(); ++i) {
    for (int j = 0; j < x.items(); ++j) {
      out << (j ? "," : "") << x(i, j);
    }
    out << '\n';
  }
}

nlohmann::json state_to_json(const PottsLattice& x) {
  return {{"rows", x.rows()}, {"cols", x.cols()}, {"colors", x.colors()},
          {"cells", std::vector<int>(x.cells().begin(), x.cells().end())}};
}

nlohmann::json state_to_json(const UndirectedGraph& x) {
  return {{"nodes", x.nodes()}, {"edges", x.edges()}};
}

nlohmann::json state_to_json(const ItemResponseMatrix& x) {
  return {{"respondents", x.respondents()}, {"items", x.items()},
          {"entries", std::vector<int>(x.entries().begin(), x.entries().end())}};
}

void state_from_json(const nlohmann::json& j, PottsLattice& x) {
  x = PottsLattice(j.at("rows").get<int>(), j.at("cols").get<int>(), j.at("colors").get<int>(),
                   j.at("cells").get<std::vector<int>>());
}

void state_from_json(const nlohmann::json& j, UndirectedGraph& x) {
  const auto edges = j.at("edges").get<std::vector<std::pair<int, int>>>();
  x = UndirectedGraph(j.at("nodes").get<int>(), edges);
}

void state_from_json(const nlohmann::json& j, ItemResponseMatrix& x) {
  const auto raw = j.at("entries").get<std::vector<int>>();
  x = ItemResponseMatrix(j.at("respondents").get<int>(), j.at("items").get<int>(),
                         std::vector<std::uint8_t>(raw.begin(), raw.end()));
}

}  // namespace dimc
