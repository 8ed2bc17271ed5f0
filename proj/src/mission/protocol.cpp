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

#include "cbrn/mission/protocol.hpp"

#include <cmath>

#include "cbrn/common/errors.hpp"
#include "cbrn/mapping/map_io.hpp"

namespace cbrn::mission
{

std::vector<std::uint32_t> rle_encode(const std::vector<std::uint8_t> & values)
{
  std::vector<std::uint32_t> runs;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i + 1;
    while (j < values.size() && values[j] == values[i]) {
      ++j;
    }
    runs.push_back(values[i]);
    runs.push_back(static_cast<std::uint32_t>(j - i));
    i = j;
  }
  return runs;
}

std::vector<std::uint8_t> rle_decode(const std::vector<std::uint32_t> & runs, std::size_t expected_size)
{
  if (runs.size() % 2 != 0) {
    throw InvalidParams("run-length data must hold value/count pairs");
  }
  std::vector<std::uint8_t> out;
  out.reserve(expected_size);
  for (std::size_t k = 0; k < runs.size(); k += 2) {
    if (runs[k] > 255 || runs[k + 1] == 0) {
      throw InvalidParams("bad run-length pair");
    }
    if (out.size() + runs[k + 1] > expected_size) {
      throw InvalidParams("run-length data longer than the raster");
    }
    out.insert(out.end(), runs[k + 1], static_cast<std::uint8_t>(runs[k]));
  }
  if (out.size() != expected_size) {
    throw InvalidParams("run-length data shorter than the raster");
  }
  return out;
}

nlohmann::json raster_to_json(
  const GridGeometry & geometry, const std::vector<std::uint8_t> & values, const nlohmann::json & extra)
{
  nlohmann::json j = mapping::geometry_to_json(geometry);
  j["encoding"] = "rle";
  j["data"] = rle_encode(values);
  for (const auto & [k, v] : extra.items()) {
    j[k] = v;
  }
  return j;
}

std::vector<std::uint8_t> raster_from_json(const nlohmann::json & j)
{
  const GridGeometry g = mapping::geometry_from_json(j);
  if (j.value("encoding", "") != "rle") {
    throw InvalidParams("unsupported raster encoding");
  }
  return rle_decode(j.at("data").get<std::vector<std::uint32_t>>(), g.size());
}

nlohmann::json finite_or_null(double v)
{
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace cbrn::mission
