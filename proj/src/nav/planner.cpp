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

#include "cbrn/nav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <tuple>

#include "cbrn/common/errors.hpp"

namespace cbrn::nav
{

namespace
{

struct Step
{
  int dx;
  int dy;
  bool diagonal;
};

constexpr Step kSteps[8] = {
  {1, 0, false}, {-1, 0, false}, {0, 1, false}, {0, -1, false},
  {1, 1, true}, {1, -1, true}, {-1, 1, true}, {-1, -1, true},
};

Cell require_cell(const Costmap & costmap, const Pose2D & pose, const char * what)
{
  const auto c = costmap.geometry.checked_cell_of(pose.position());
  if (!c) {
    throw OutOfBounds(std::string(what) + " pose is outside the costmap");
  }
  return *c;
}

/// Calls fn(neighbor_index, step_cost) for every legal move out of `from`.
template<class Fn>
void for_each_move(const Costmap & costmap, const Cell & from, const PlannerParams & params, Fn && fn)
{
  const auto & g = costmap.geometry;
  for (const auto & s : kSteps) {
    const Cell to{from.ix + s.dx, from.iy + s.dy};
    if (!g.contains(to)) {
      continue;
    }
    const std::size_t ti = g.index(to);
    if (costmap.blocked(ti)) {
      continue;
    }
    if (s.diagonal &&
      (costmap.blocked(g.index({from.ix + s.dx, from.iy})) ||
      costmap.blocked(g.index({from.ix, from.iy + s.dy}))))
    {
      continue;
    }
    fn(ti, step_cost_units(costmap, ti, s.diagonal, params));
  }
}

std::int64_t octile_units(const Cell & a, const Cell & b, std::int64_t straight, std::int64_t diag)
{
  const std::int64_t dx = std::abs(a.ix - b.ix);
  const std::int64_t dy = std::abs(a.iy - b.iy);
  return straight * (std::max(dx, dy) - std::min(dx, dy)) + diag * std::min(dx, dy);
}

using QueueEntry = std::tuple<std::int64_t, std::size_t>;  // (priority, cell)

}  // namespace

double Path::length() const
{
  double len = 0.0;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    len += distance(poses[i - 1], poses[i]);
  }
  return len;
}

std::int64_t step_cost_units(const Costmap & costmap, std::size_t to, bool diagonal, const PlannerParams & params)
{
  const double len = costmap.geometry.resolution * (diagonal ? std::numbers::sqrt2 : 1.0);
  const double factor = 1.0 + costmap.cost[to] / 254.0 * params.cost_weight;
  return std::llround(kCostUnitsPerMeter * len * factor);
}

Path plan(const Costmap & costmap, const Pose2D & start, const Pose2D & goal, const PlannerParams & params)
{
  const auto & g = costmap.geometry;
  const Cell sc = require_cell(costmap, start, "start");
  const Cell gc = require_cell(costmap, goal, "goal");
  const std::size_t si = g.index(sc);
  const std::size_t gi = g.index(gc);
  if (costmap.lethal(si)) {
    throw NoPath("start cell is lethal");
  }

  Path path;
  if (si == gi) {
    const Point2 c = g.center(si);
    path.poses.push_back({c.x, c.y, goal.theta});
    path.cells.push_back(si);
    return path;
  }
  if (costmap.blocked(gi)) {
    throw GoalLethal("goal cell is inside the inscribed footprint of an obstacle");
  }

  const std::int64_t straight = std::llround(kCostUnitsPerMeter * g.resolution);
  const std::int64_t diag = std::llround(kCostUnitsPerMeter * g.resolution * std::numbers::sqrt2);

  std::vector<std::int64_t> best(g.size(), kUnreachable);
  std::vector<std::size_t> parent(g.size(), g.size());
  std::vector<std::uint8_t> closed(g.size(), 0);
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;
  best[si] = 0;
  open.emplace(octile_units(sc, gc, straight, diag), si);

  bool found = false;
  while (!open.empty()) {
    const auto [f, ci] = open.top();
    open.pop();
    if (closed[ci]) {
      continue;
    }
    closed[ci] = 1;
    if (ci == gi) {
      found = true;
      break;
    }
    const Cell cc = g.cell(ci);
    for_each_move(
      costmap, cc, params, [&](std::size_t ni, std::int64_t step) {
        if (closed[ni]) {
          return;
        }
        const std::int64_t cand = best[ci] + step;
        if (cand < best[ni]) {
          best[ni] = cand;
          parent[ni] = ci;
          open.emplace(cand + octile_units(g.cell(ni), gc, straight, diag), ni);
        }
      });
  }
  if (!found) {
    throw NoPath("goal is unreachable from start");
  }

  for (std::size_t c = gi; c != g.size(); c = parent[c]) {
    path.cells.push_back(c);
    if (c == si) {
      break;
    }
  }
  std::reverse(path.cells.begin(), path.cells.end());
  path.poses.reserve(path.cells.size());
  for (std::size_t k = 0; k < path.cells.size(); ++k) {
    const Point2 c = g.center(path.cells[k]);
    double theta = goal.theta;
    if (k + 1 < path.cells.size()) {
      const Point2 n = g.center(path.cells[k + 1]);
      theta = std::atan2(n.y - c.y, n.x - c.x);
    }
    path.poses.push_back({c.x, c.y, normalize_angle(theta)});
  }
  path.cost_units = best[gi];
  path.cost = static_cast<double>(best[gi]) / kCostUnitsPerMeter;
  return path;
}

std::vector<std::int64_t> cost_to_all(const Costmap & costmap, const Pose2D & start, const PlannerParams & params)
{
  const auto & g = costmap.geometry;
  const Cell sc = require_cell(costmap, start, "start");
  const std::size_t si = g.index(sc);
  std::vector<std::int64_t> best(g.size(), kUnreachable);
  if (costmap.lethal(si)) {
    return best;
  }
  std::vector<std::uint8_t> closed(g.size(), 0);
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;
  best[si] = 0;
  open.emplace(0, si);
  while (!open.empty()) {
    const auto [d, ci] = open.top();
    open.pop();
    if (closed[ci]) {
      continue;
    }
    closed[ci] = 1;
    for_each_move(
      costmap, g.cell(ci), params, [&](std::size_t ni, std::int64_t step) {
        const std::int64_t cand = d + step;
        if (!closed[ni] && cand < best[ni]) {
          best[ni] = cand;
          open.emplace(cand, ni);
        }
      });
  }
  return best;
}

}  // namespace cbrn::nav
