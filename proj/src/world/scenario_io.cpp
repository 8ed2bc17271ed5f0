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

#include "cbrn/world/scenario_io.hpp"

#include <string>

#include "cbrn/common/errors.hpp"
#include "cbrn/common/json_util.hpp"

namespace cbrn::world
{

using nlohmann::json;
using namespace cbrn::json_util;

WorldConfig world_config_from_json(const json & j, const std::string & path)
{
  if (!j.is_object()) {
    throw ConfigError(path.empty() ? "/" : path, "world description must be an object");
  }
  WorldConfig cfg;
  cfg.geometry.resolution = require_number(j, "resolution", path);
  if (!(cfg.geometry.resolution > 0.0)) {
    throw ConfigError(child(path, "resolution"), "must be > 0");
  }

  const auto & rows = require(j, "grid", path);
  const std::string grid_path = child(path, "grid");
  if (!rows.is_array() || rows.empty()) {
    throw ConfigError(grid_path, "expected a non-empty array of strings");
  }
  const int height = static_cast<int>(rows.size());
  int width = -1;
  for (int r = 0; r < height; ++r) {
    const std::string row_path = grid_path + "/" + std::to_string(r);
    if (!rows[static_cast<std::size_t>(r)].is_string()) {
      throw ConfigError(row_path, "expected a string");
    }
    const auto & s = rows[static_cast<std::size_t>(r)].get_ref<const std::string &>();
    if (width < 0) {
      width = static_cast<int>(s.size());
      if (width == 0) {
        throw ConfigError(row_path, "empty row");
      }
      cfg.geometry.width = width;
      cfg.geometry.height = height;
      cfg.occupied.assign(cfg.geometry.size(), 0);
    } else if (static_cast<int>(s.size()) != width) {
      throw ConfigError(row_path, "row length differs from first row");
    }
    const int iy = height - 1 - r;
    for (int ix = 0; ix < width; ++ix) {
      const char ch = s[static_cast<std::size_t>(ix)];
      if (ch != '#' && ch != '.') {
        throw ConfigError(row_path, std::string("unexpected character '") + ch + "'");
      }
      cfg.occupied[cfg.geometry.index({ix, iy})] = ch == '#' ? 1 : 0;
    }
  }

  if (j.contains("origin")) {
    cfg.geometry.origin = pose_from_json(j.at("origin"), child(path, "origin"));
  }

  if (j.contains("sources")) {
    const auto & srcs = j.at("sources");
    const std::string src_path = child(path, "sources");
    if (!srcs.is_array()) {
      throw ConfigError(src_path, "expected an array");
    }
    for (std::size_t i = 0; i < srcs.size(); ++i) {
      const std::string p = src_path + "/" + std::to_string(i);
      RadiationSource s;
      s.position.x = require_number(srcs[i], "x", p);
      s.position.y = require_number(srcs[i], "y", p);
      s.intensity = require_number(srcs[i], "intensity", p);
      if (!(s.intensity >= 0.0)) {
        throw ConfigError(child(p, "intensity"), "must be >= 0");
      }
      if (!cfg.geometry.contains(s.position)) {
        throw ConfigError(p, "source lies outside the grid");
      }
      cfg.sources.push_back(s);
    }
  }

  cfg.background_rate = require_number(j, "background_rate", path);
  if (!(cfg.background_rate >= 0.0)) {
    throw ConfigError(child(path, "background_rate"), "must be >= 0");
  }
  cfg.attenuation_coeff = require_number(j, "attenuation_coeff", path);
  if (!(cfg.attenuation_coeff >= 0.0)) {
    throw ConfigError(child(path, "attenuation_coeff"), "must be >= 0");
  }
  cfg.robot_radius = require_number(j, "robot_radius", path);
  if (!(cfg.robot_radius > 0.0)) {
    throw ConfigError(child(path, "robot_radius"), "must be > 0");
  }
  cfg.start_pose = pose_from_json(require(j, "start_pose", path), child(path, "start_pose"));
  const auto & seed = require(j, "seed", path);
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    throw ConfigError(child(path, "seed"), "expected a non-negative integer");
  }
  cfg.seed = seed.get<std::uint64_t>();
  return cfg;
}

std::vector<std::string> grid_rows(const WorldConfig & config)
{
  const auto & g = config.geometry;
  std::vector<std::string> rows;
  rows.reserve(static_cast<std::size_t>(g.height));
  for (int iy = g.height - 1; iy >= 0; --iy) {
    std::string row(static_cast<std::size_t>(g.width), '.');
    for (int ix = 0; ix < g.width; ++ix) {
      if (config.occupied[g.index({ix, iy})] != 0) {
        row[static_cast<std::size_t>(ix)] = '#';
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json world_config_to_json(const WorldConfig & config)
{
  json sources = json::array();
  for (const auto & s : config.sources) {
    sources.push_back({{"x", s.position.x}, {"y", s.position.y}, {"intensity", s.intensity}});
  }
  json j{
    {"resolution", config.geometry.resolution},
    {"grid", grid_rows(config)},
    {"sources", sources},
    {"background_rate", config.background_rate},
    {"attenuation_coeff", config.attenuation_coeff},
    {"robot_radius", config.robot_radius},
    {"start_pose", pose_to_json(config.start_pose)},
    {"seed", config.seed},
  };
  if (!(config.geometry.origin == Pose2D{})) {
    j["origin"] = pose_to_json(config.geometry.origin);
  }
  return j;
}

}  // namespace cbrn::world
