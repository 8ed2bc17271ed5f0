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

#ifndef CBRN__WORLD__SCENARIO_IO_HPP_
#define CBRN__WORLD__SCENARIO_IO_HPP_

#include <string>

#include <json.hpp>

#include "cbrn/world/world.hpp"

namespace cbrn::world
{

/// Parses the scenario world description:
///   {resolution, grid: ["#..", ...], sources: [{x, y, intensity}],
///    background_rate, attenuation_coeff, robot_radius, start_pose, seed}
/// The first grid string is the top row (largest y). Errors are reported
/// as ConfigError with a JSON pointer under `path`.
WorldConfig world_config_from_json(const nlohmann::json & j, const std::string & path = "");

nlohmann::json world_config_to_json(const WorldConfig & config);

/// Grid rows as "#"/"." strings, top row first.
std::vector<std::string> grid_rows(const WorldConfig & config);

}  // namespace cbrn::world

#endif  // CBRN__WORLD__SCENARIO_IO_HPP_
