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

#include "cbrn/explore/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbrn::explore
{

using mapping::CellState;

bool is_frontier_cell(const mapping::TriStateGrid & tri, std::size_t index)
{
  if (tri.cells[index] != CellState::kFree) {
    return false;
  }
  const auto & g = tri.geometry;
  const Cell c = g.cell(index);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const Cell n{c.ix + dx, c.iy + dy};
      if ((dx != 0 || dy != 0) && g.contains(n) && tri.at(n) == CellState::kUnknown) {
        return true;
      }
    }
  }
  return false;
}

std::vector<Frontier> detect_frontiers(const mapping::TriStateGrid & tri, std::size_t min_size)
{
  const auto & g = tri.geometry;
  std::vector<std::uint8_t> mark(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    mark[i] = is_frontier_cell(tri, i) ? 1 : 0;
  }

  std::vector<Frontier> out;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < g.size(); ++seed) {
    if (mark[seed] != 1) {
      continue;
    }
    Frontier f;
    mark[seed] = 2;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      f.cells.push_back(i);
      const Cell c = g.cell(i);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const Cell n{c.ix + dx, c.iy + dy};
          if (!g.contains(n)) {
            continue;
          }
          const std::size_t ni = g.index(n);
          if (mark[ni] == 1) {
            mark[ni] = 2;
            stack.push_back(ni);
          }
        }
      }
    }
    if (f.cells.size() < min_size) {
      continue;
    }
    std::sort(f.cells.begin(), f.cells.end());
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i : f.cells) {
      const Point2 p = g.center(i);
      sx += p.x;
      sy += p.y;
    }
    f.size = f.cells.size();
    f.centroid = {sx / f.size, sy / f.size};
    out.push_back(std::move(f));
  }
  return out;
}

void GoalBlacklist::add(std::size_t cell, int cycles)
{
  auto it = entries_.find(cell);
  if (it == entries_.end()) {
    entries_.emplace(cell, cycles);
  } else if (it->second >= 0 && (cycles < 0 || cycles > it->second)) {
    it->second = cycles;
  }
}

void GoalBlacklist::next_cycle()
{
  for (auto it = entries_.begin(); it != entries_.end(); ) {
    if (it->second < 0) {
      ++it;
      continue;
    }
    if (--it->second <= 0) {
      it = entries_.erase(it);
    } else {
      ++it;
    }
  }
}

int GoalBlacklist::strike(const GridGeometry & geometry, std::size_t cell, double radius)
{
  strikes_.push_back(cell);
  const Point2 p = geometry.center(cell);
  int n = 0;
  for (std::size_t c : strikes_) {
    n += distance(geometry.center(c), p) <= radius + 1e-9;
  }
  return n;
}

GoalBlacklist::Hit GoalBlacklist::excludes(const GridGeometry & geometry, std::size_t cell, double radius) const
{
  const Point2 p = geometry.center(cell);
  Hit hit = Hit::kNone;
  for (const auto & [c, cycles] : entries_) {
    if (distance(geometry.center(c), p) <= radius + 1e-9) {
      if (cycles < 0) {
        return Hit::kPermanent;
      }
      hit = Hit::kTimed;
    }
  }
  return hit;
}

std::optional<std::size_t> snap_goal_cell(
  const Frontier & frontier, const mapping::TriStateGrid & tri, const std::vector<std::int64_t> & reach,
  const nav::Costmap & costmap, double snap_radius, std::uint8_t max_cost)
{
  const auto & g = tri.geometry;
  const int r = static_cast<int>(std::ceil(snap_radius / g.resolution));
  const double r2 = snap_radius * snap_radius + 1e-12;
  std::vector<std::size_t> candidates;
  for (std::size_t fi : frontier.cells) {
    const Cell fc = g.cell(fi);
    const Point2 fp = g.center(fi);
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        const Cell n{fc.ix + dx, fc.iy + dy};
        if (!g.contains(n)) {
          continue;
        }
        const std::size_t ni = g.index(n);
        if (tri.cells[ni] != CellState::kFree || costmap.blocked(ni) || costmap.cost[ni] > max_cost ||
          reach[ni] == nav::kUnreachable)
        {
          continue;
        }
        const Point2 np = g.center(ni);
        const double ex = np.x - fp.x;
        const double ey = np.y - fp.y;
        if (ex * ex + ey * ey <= r2) {
          candidates.push_back(ni);
        }
      }
    }
  }
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c : candidates) {
    const double d = distance(g.center(c), frontier.centroid);
    if (d < best_d || (d == best_d && c < *best)) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

GoalSelection select_goal(
  std::vector<Frontier> & frontiers, const mapping::TriStateGrid & tri, const nav::Costmap & costmap,
  const Pose2D & pose, const ExplorationParams & params, const GoalBlacklist * blacklist,
  const nav::PlannerParams & planner)
{
  GoalSelection out;
  if (frontiers.empty()) {
    return out;
  }
  const auto reach = nav::cost_to_all(costmap, pose, planner);
  const auto & g = tri.geometry;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < frontiers.size(); ++k) {
    Frontier & f = frontiers[k];
    f.travel_cost = std::numeric_limits<double>::infinity();
    const auto cell = snap_goal_cell(f, tri, reach, costmap, params.snap_radius, params.max_goal_cost);
    if (!cell) {
      continue;
    }
    if (blacklist != nullptr) {
      const auto hit = blacklist->excludes(g, *cell, params.blacklist_radius);
      if (hit == GoalBlacklist::Hit::kTimed) {
        ++out.deferred;
      }
      if (hit != GoalBlacklist::Hit::kNone) {
        continue;
      }
    }
    f.travel_cost = static_cast<double>(reach[*cell]) / nav::kCostUnitsPerMeter;
    const double score = f.travel_cost / std::pow(static_cast<double>(f.size), params.size_exponent);
    if (score < best) {
      best = score;
      const Point2 c = g.center(*cell);
      const Point2 p = pose.position();
      const double theta = (c == p) ? pose.theta : std::atan2(c.y - p.y, c.x - p.x);
      out.goal = Pose2D{c.x, c.y, theta};
      out.frontier = k;
      out.goal_cell = *cell;
      out.score = score;
    }
  }
  return out;
}

}  // namespace cbrn::explore
