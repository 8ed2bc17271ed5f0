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

#ifndef CBRN__EXPLORE__FRONTIER_HPP_
#define CBRN__EXPLORE__FRONTIER_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "cbrn/common/geometry.hpp"
#include "cbrn/mapping/occupancy_grid.hpp"
#include "cbrn/nav/costmap.hpp"
#include "cbrn/nav/planner.hpp"

namespace cbrn::explore
{

struct Frontier
{
  std::vector<std::size_t> cells;  // ascending linear indices
  Point2 centroid;
  std::size_t size{0};
  double travel_cost{0.0};         // filled by select_goal
};

/// FREE cell with at least one UNKNOWN 8-neighbor.
bool is_frontier_cell(const mapping::TriStateGrid & tri, std::size_t index);

/// 8-connected components of frontier cells with at least `min_size`
/// cells, ordered by their smallest cell index.
std::vector<Frontier> detect_frontiers(const mapping::TriStateGrid & tri, std::size_t min_size);

/// Goal cells excluded from selection, some only for a number of cycles.
class GoalBlacklist
{
public:
  /// cycles < 0 excludes the cell for the rest of the mission.
  void add(std::size_t cell, int cycles);
  /// Ages timed entries by one goal cycle.
  void next_cycle();
  /// Records a failed attempt at `cell`; returns the number of failures
  /// recorded within `radius` meters of it, this one included.
  int strike(const GridGeometry & geometry, std::size_t cell, double radius);
  void clear() {entries_.clear(); strikes_.clear();}
  bool contains(std::size_t cell) const {return entries_.count(cell) > 0;}
  enum class Hit {kNone, kTimed, kPermanent};
  /// Entry within `radius` meters of `cell`; permanent entries win.
  Hit excludes(const GridGeometry & geometry, std::size_t cell, double radius) const;
  std::size_t size() const {return entries_.size();}

private:
  std::map<std::size_t, int> entries_;
  std::vector<std::size_t> strikes_;
};

struct ExplorationParams
{
  std::size_t min_frontier_size{3};
  double size_exponent{0.5};
  /// Goal candidates are reachable FREE cells within this distance of a
  /// frontier cell.
  double snap_radius{0.3};
  /// Goal cells must not cost more than this (keeps goals off walls).
  std::uint8_t max_goal_cost{nav::kMaxInflatedCost};
  int blacklist_cycles{3};
  double blacklist_radius{0.1};
  /// Failed attempts within snap_radius of a goal before it is excluded
  /// for good.
  int max_strikes{2};
};

struct GoalSelection
{
  std::optional<Pose2D> goal;       // empty = exhausted
  std::size_t frontier{0};          // index into the input list
  std::size_t goal_cell{0};
  double score{0.0};
  /// Frontiers skipped only because of a timed blacklist entry.
  std::size_t deferred{0};

  bool exhausted() const {return !goal.has_value();}
};

/// Reachable FREE cell closest to the frontier centroid among cells within
/// snap_radius of one of its cells and costing at most max_cost; ties go to
/// the lowest index.
std::optional<std::size_t> snap_goal_cell(
  const Frontier & frontier, const mapping::TriStateGrid & tri, const std::vector<std::int64_t> & reach,
  const nav::Costmap & costmap, double snap_radius, std::uint8_t max_cost = nav::kMaxInflatedCost);

/// Picks the frontier minimising travel_cost / size^gamma. Frontiers with
/// no reachable goal cell or a blacklisted goal are skipped. Fills each
/// frontier's travel_cost (infinity when skipped).
GoalSelection select_goal(
  std::vector<Frontier> & frontiers, const mapping::TriStateGrid & tri, const nav::Costmap & costmap,
  const Pose2D & pose, const ExplorationParams & params = {}, const GoalBlacklist * blacklist = nullptr,
  const nav::PlannerParams & planner = {});

}  // namespace cbrn::explore

#endif  // CBRN__EXPLORE__FRONTIER_HPP_
