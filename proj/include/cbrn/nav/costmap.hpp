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

#ifndef CBRN__NAV__COSTMAP_HPP_
#define CBRN__NAV__COSTMAP_HPP_

#include <cstdint>
#include <vector>

#include "cbrn/common/grid.hpp"
#include "cbrn/mapping/occupancy_grid.hpp"

namespace cbrn::nav
{

inline constexpr std::uint8_t kFreeCost = 0;
inline constexpr std::uint8_t kMaxInflatedCost = 253;
/// Robot center here means the padded footprint touches an obstacle.
inline constexpr std::uint8_t kInscribedCost = 254;
inline constexpr std::uint8_t kLethalCost = 255;

struct CostmapParams
{
  /// Inscribed radius = robot_radius + padding, measured from a cell center
  /// to the nearest edge of a lethal cell.
  double robot_radius{0.0};
  double padding{0.05};
  double inflation_radius{0.5};
  /// Exponential decay rate (1/m) of the inflated cost past the inscribed radius.
  double decay{10.0};
  bool unknown_lethal{true};
  /// Cost of UNKNOWN cells when they are not lethal.
  std::uint8_t unknown_cost{200};

  double inscribed_radius() const {return robot_radius + padding;}
};

/// Static layer from the classified map plus an inflation layer.
struct Costmap
{
  GridGeometry geometry;
  std::vector<std::uint8_t> cost;
  double inscribed_radius{0.0};

  std::uint8_t at(const Cell & c) const {return cost[geometry.index(c)];}
  std::uint8_t at(std::size_t i) const {return cost[i];}

  /// Cells a planned path may not enter.
  bool blocked(std::size_t i) const {return cost[i] >= kInscribedCost;}
  bool lethal(std::size_t i) const {return cost[i] == kLethalCost;}
};

/// Inflated cost for a cell whose nearest lethal cell is `d` meters away.
std::uint8_t inflation_cost(double d, const CostmapParams & params);

/// Builds the layered costmap. The distance layer is an exact windowed
/// separable transform, parallel over rows and columns.
Costmap build_costmap(const mapping::TriStateGrid & tri, const CostmapParams & params);

/// Single-threaded reference: scans the full inflation window of every cell.
Costmap build_costmap_reference(const mapping::TriStateGrid & tri, const CostmapParams & params);

/// Convenience form with a point robot: padding is the whole inscribed radius.
Costmap build_costmap(const mapping::TriStateGrid & tri, double padding, double inflation_radius);

}  // namespace cbrn::nav

#endif  // CBRN__NAV__COSTMAP_HPP_
