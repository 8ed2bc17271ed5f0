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

#include "cbrn/mapping/map_io.hpp"

#include <cmath>
#include <fstream>

#include "cbrn/common/errors.hpp"
#include "cbrn/common/json_util.hpp"

namespace cbrn::mapping
{

using nlohmann::json;

void write_plain_pgm(
  const std::string & path, const GridGeometry & geometry, const std::vector<std::uint8_t> & gray)
{
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open " + path + " for writing");
  }
  out << "P2\n" << geometry.width << " " << geometry.height << "\n255\n";
  for (int iy = geometry.height - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < geometry.width; ++ix) {
      out << static_cast<int>(gray[geometry.index({ix, iy})]);
      out << (ix + 1 == geometry.width ? '\n' : ' ');
    }
  }
}

std::vector<std::uint8_t> read_plain_pgm(const std::string & path, int & width, int & height)
{
  std::ifstream in(path);
  std::string magic;
  int maxval = 0;
  if (!(in >> magic >> width >> height >> maxval) || magic != "P2" || width <= 0 || height <= 0) {
    throw Error("not a plain PGM: " + path);
  }
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int iy = height - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < width; ++ix) {
      int v = 0;
      if (!(in >> v)) {
        throw Error("truncated PGM: " + path);
      }
      gray[static_cast<std::size_t>(iy) * static_cast<std::size_t>(width) +
        static_cast<std::size_t>(ix)] = static_cast<std::uint8_t>(v);
    }
  }
  return gray;
}

json geometry_to_json(const GridGeometry & geometry)
{
  return json{
    {"resolution", geometry.resolution},
    {"width", geometry.width},
    {"height", geometry.height},
    {"origin", json_util::pose_to_json(geometry.origin)},
  };
}

GridGeometry geometry_from_json(const json & j, const std::string & path)
{
  GridGeometry g;
  g.resolution = json_util::require_number(j, "resolution", path);
  json_util::read_int(j, "width", path, g.width);
  json_util::read_int(j, "height", path, g.height);
  if (j.contains("origin")) {
    g.origin = json_util::pose_from_json(j.at("origin"), json_util::child(path, "origin"));
  }
  if (!g.valid()) {
    throw ConfigError(path.empty() ? "/" : path, "geometry needs positive resolution, width, height");
  }
  return g;
}

std::vector<std::uint8_t> occupancy_gray(const OccupancyGrid & map)
{
  std::vector<std::uint8_t> gray(map.geometry().size());
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - map.probability(i))));
  }
  return gray;
}

void export_occupancy(const std::string & stem, const OccupancyGrid & map)
{
  write_plain_pgm(stem + ".pgm", map.geometry(), occupancy_gray(map));
  std::ofstream side(stem + ".json");
  side << geometry_to_json(map.geometry()).dump(2) << "\n";
}

GridGeometry load_geometry(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open " + path);
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error & e) {
    throw ConfigError("/", std::string("invalid JSON in ") + path + ": " + e.what());
  }
  if (j.contains("grid") && j.at("grid").is_array()) {
    // scenario file: derive the geometry from the grid rows
    GridGeometry g;
    g.resolution = json_util::require_number(j, "resolution", "");
    const auto & rows = j.at("grid");
    g.height = static_cast<int>(rows.size());
    g.width = rows.empty() ? 0 : static_cast<int>(rows[0].get<std::string>().size());
    if (j.contains("origin")) {
      g.origin = json_util::pose_from_json(j.at("origin"), "/origin");
    }
    if (!g.valid()) {
      throw ConfigError("/grid", "empty grid");
    }
    return g;
  }
  return geometry_from_json(j);
}

}  // namespace cbrn::mapping
