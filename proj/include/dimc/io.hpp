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

#ifndef DIMC_IO_HPP
#define DIMC_IO_HPP

#include "dimc/models.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>

namespace dimc {

/// Whitespace-separated integer grid, one lattice row per line. When
/// \p colors is empty K is taken as the largest value present.
PottsLattice read_potts_lattice(const std::filesystem::path& path, std::optional<int> colors = std::nullopt);
void write_potts_lattice(const PottsLattice& lattice, const std::filesystem::path& path);

/// One "i j" pair per line, 0-based; '#' starts a comment. When \p nodes is
/// empty the node count is the largest index plus one.
UndirectedGraph read_edge_list(const std::filesystem::path& path, std::optional<int> nodes = std::nullopt);
void write_edge_list(const UndirectedGraph& graph, const std::filesystem::path& path);

/// Headerless CSV of 0/1 values, one respondent per row.
ItemResponseMatrix read_item_responses(const std::filesystem::path& path);
void write_item_responses(const ItemResponseMatrix& data, const std::filesystem::path& path);

nlohmann::json state_to_json(const PottsLattice& x);
nlohmann::json state_to_json(const UndirectedGraph& x);
nlohmann::json state_to_json(const ItemResponseMatrix& x);
void state_from_json(const nlohmann::json& j, PottsLattice& x);
void state_from_json(const nlohmann::json& j, UndirectedGraph& x);
void state_from_json(const nlohmann::json& j, ItemResponseMatrix& x);

}  // namespace dimc

#endif  // DIMC_IO_HPP
