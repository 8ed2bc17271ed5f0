/*
 * Copyright 2026 The cbrn_sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CBRN__MAPPING__MAP_IO_HPP_
#define CBRN__MAPPING__MAP_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbrn/common/grid.hpp"
#include "cbrn/mapping/occupancy_grid.hpp"

namespace cbrn::mapping
{

/// Plain (P2) PGM, top row first. `gray` is indexed like the grid.
void write_plain_pgm(
  const std::string & path, const GridGeometry & geometry,
  const std::vector<std::uint8_t> & gray);

/// Reads a plain PGM back into grid order (bottom row first).
std::vector<std::uint8_t> read_plain_pgm(const std::string & path, int & width, int & height);

nlohmann::json geometry_to_json(const GridGeometry & geometry);
GridGeometry geometry_from_json(const nlohmann::json & j, const std::string & path = "");

/// Gray level 255 * (1 - p): free is white, occupied black.
std::vector<std::uint8_t> occupancy_gray(const OccupancyGrid & map);

/// Writes `<stem>.pgm` and the `<stem>.json` sidecar {resolution, origin, width, height}.
void export_occupancy(const std::string & stem, const OccupancyGrid & map);

/// Reads geometry from a sidecar JSON or a scenario file.
GridGeometry load_geometry(const std::string & path);

}  // namespace cbrn::mapping

#endif  // CBRN__MAPPING__MAP_IO_HPP_
