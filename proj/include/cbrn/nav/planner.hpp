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

#ifndef CBRN__NAV__PLANNER_HPP_
#define CBRN__NAV__PLANNER_HPP_

#include <cstdint>
#include <limits>
#include <vector>

#include "cbrn/common/geometry.hpp"
#include "cbrn/nav/costmap.hpp"

namespace cbrn::nav
{

struct PlannerParams
{
  /// Weight of the cell cost in the step cost.
  double cost_weight{10.0};
};

struct Path
{
  std::vector<Pose2D> poses;        // cell centers, start first
  std::vector<std::size_t> cells;   // matching linear cell indices
  std::int64_t cost_units{0};
  double cost{0.0};                 // meters, weighted

  bool empty() const {return poses.empty();}
  /// Polyline length of the waypoints.
  double length() const;
};

/// Path costs are accumulated as integers in micrometer units so that two
/// planners on the same graph agree exactly.
inline constexpr double kCostUnitsPerMeter = 1e6;
inline constexpr std::int64_t kUnreachable = std::numeric_limits<std::int64_t>::max();

/// Cost of stepping into cell `to` over `step_cells` cell lengths (1 or
/// sqrt 2): llround(1e6 * step_length * (1 + cost(to) / 254 * w)).
std::int64_t step_cost_units(const Costmap & costmap, std::size_t to, bool diagonal, const PlannerParams & params);

/// Graph: 8-connected cells below the inscribed cost; a diagonal step is
/// allowed only when both orthogonal cells it cuts past are open too. The
/// start cell may itself be inscribed (the robot can stand close to a wall).
/// A* with the octile heuristic; ties on f break toward the lower cell
/// index. Throws GoalLethal when the goal cell is blocked, NoPath when it
/// is unreachable, OutOfBounds when either pose is off the map.
Path plan(const Costmap & costmap, const Pose2D & start, const Pose2D & goal, const PlannerParams & params = {});

/// Single-source costs (cost units) over the same graph; kUnreachable where
/// no path exists.
std::vector<std::int64_t> cost_to_all(const Costmap & costmap, const Pose2D & start, const PlannerParams & params = {});

}  // namespace cbrn::nav

#endif  // CBRN__NAV__PLANNER_HPP_
