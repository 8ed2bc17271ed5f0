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

#include "cbrn/mapping/occupancy_grid.hpp"

#include <algorithm>
#include <string>

#include "cbrn/common/errors.hpp"
#include "cbrn/common/raytrace.hpp"

namespace cbrn::mapping
{

OccupancyGrid::OccupancyGrid(const GridGeometry & geometry, double clamp)
: geometry_(geometry), clamp_(clamp), logodds_(geometry.size(), 0.0)
{
  if (!geometry.valid()) {
    throw InvalidParams("occupancy grid geometry must have positive size and resolution");
  }
  if (!(clamp > 0.0)) {
    throw InvalidParams("log-odds clamp must be > 0");
  }
}

void OccupancyGrid::update(std::size_t i, double delta)
{
  logodds_[i] = std::clamp(logodds_[i] + delta, -clamp_, clamp_);
}

void OccupancyGrid::integrate(const RangeScan & scan, const MappingParams & params)
{
  const Point2 origin = scan.pose.position();
  if (!geometry_.contains(origin)) {
    throw OutOfBounds(
            "scan pose (" + std::to_string(origin.x) + ", " + std::to_string(origin.y) +
            ") is outside the map");
  }
  // The endpoint of a return sits on the boundary of the hit cell; probing
  // slightly past it picks the hit cell rather than its free neighbour.
  const double nudge = 1e-6 * geometry_.resolution;
  for (std::size_t k = 0; k < scan.ranges.size(); ++k) {
    const double range = scan.ranges[k];
    const bool hit = range < scan.max_range;
    const double probe = hit ? range + nudge : range;
    traverse_ray(
      geometry_, origin, scan.pose.theta + scan.angles[k], probe,
      [&](const Cell & c, double t_enter, double t_exit) {
        const std::size_t i = geometry_.index(c);
        // A return at the entry boundary also counts, so a beam that only
        // clips the corner of the hit cell still lands there.
        if (hit && (t_exit >= probe || t_enter >= range - nudge)) {
          update(i, params.l_occ);
          return false;
        }
        if (t_enter >= probe) {
          return false;
        }
        update(i, params.l_free);
        return true;
      });
  }
}

OccupancyGrid integrate_scan(OccupancyGrid map, const RangeScan & scan, const MappingParams & params)
{
  map.integrate(scan, params);
  return map;
}

TriStateGrid classify(const OccupancyGrid & map, double p_free, double p_occ)
{
  if (!(0.0 < p_free && p_free < p_occ && p_occ < 1.0)) {
    throw InvalidParams("classification thresholds must satisfy 0 < p_free < p_occ < 1");
  }
  TriStateGrid out{map.geometry(), std::vector<CellState>(map.geometry().size())};
  const auto n = static_cast<std::ptrdiff_t>(out.cells.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double p = map.probability(static_cast<std::size_t>(i));
    CellState s = CellState::kUnknown;
    if (p <= p_free) {
      s = CellState::kFree;
    } else if (p >= p_occ) {
      s = CellState::kOccupied;
    }
    out.cells[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

}  // namespace cbrn::mapping
