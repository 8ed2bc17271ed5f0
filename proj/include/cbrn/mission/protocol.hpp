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

#ifndef CBRN__MISSION__PROTOCOL_HPP_
#define CBRN__MISSION__PROTOCOL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbrn/common/grid.hpp"

namespace cbrn::mission
{

inline constexpr const char * kLogSchema = "cbrn.mission.log/1";
inline constexpr const char * kProtocolVersion = "cbrn.ws/1";

/// Run-length encoding as a flat [value, count, value, count, ...] list.
std::vector<std::uint32_t> rle_encode(const std::vector<std::uint8_t> & values);
/// Throws InvalidParams on a malformed list or when the decoded length is
/// not `expected_size`.
std::vector<std::uint8_t> rle_decode(const std::vector<std::uint32_t> & runs, std::size_t expected_size);

/// {width, height, resolution, origin, encoding: "rle", data} plus `extra`.
nlohmann::json raster_to_json(
  const GridGeometry & geometry, const std::vector<std::uint8_t> & values,
  const nlohmann::json & extra = nlohmann::json::object());
std::vector<std::uint8_t> raster_from_json(const nlohmann::json & j);

/// JSON number, or null for non-finite values (JSON has no infinity).
nlohmann::json finite_or_null(double v);

}  // namespace cbrn::mission

#endif  // CBRN__MISSION__PROTOCOL_HPP_
