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

#ifndef CBRN__COMMON__RAYTRACE_HPP_
#define CBRN__COMMON__RAYTRACE_HPP_

#include <cmath>
#include <limits>

#include "cbrn/common/grid.hpp"

namespace cbrn
{

/// Grid line traversal (Amanatides & Woo). Calls
/// `visit(cell, t_enter, t_exit)` for every cell the ray passes through, in
/// order, with distances in meters along the ray. Stops when the visitor
/// returns false, when t_exit reaches max_t, or when the ray leaves the
/// grid. A ray exactly through a cell corner steps x before y.
template<class Visitor>
void traverse_ray(
  const GridGeometry & grid, const Point2 & start, double world_angle, double max_t,
  Visitor && visit)
{
  const Point2 local = grid.to_local(start);
  const double angle = world_angle - grid.origin.theta;
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  const double res = grid.resolution;
  const double px = local.x / res;
  const double py = local.y / res;

  Cell c{static_cast<int>(std::floor(px)), static_cast<int>(std::floor(py))};
  if (!grid.contains(c)) {
    return;
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  const int step_x = dx > 0.0 ? 1 : -1;
  const int step_y = dy > 0.0 ? 1 : -1;
  double t_max_x = inf;
  double t_max_y = inf;
  double t_delta_x = inf;
  double t_delta_y = inf;
  if (dx != 0.0) {
    const double boundary = dx > 0.0 ? c.ix + 1.0 : static_cast<double>(c.ix);
    t_max_x = (boundary - px) / dx * res;
    t_delta_x = res / std::abs(dx);
  }
  if (dy != 0.0) {
    const double boundary = dy > 0.0 ? c.iy + 1.0 : static_cast<double>(c.iy);
    t_max_y = (boundary - py) / dy * res;
    t_delta_y = res / std::abs(dy);
  }

  double t_enter = 0.0;
  while (true) {
    const double t_exit = std::min(t_max_x, t_max_y);
    if (!visit(c, t_enter, t_exit)) {
      return;
    }
    if (t_exit >= max_t) {
      return;
    }
    if (t_max_x <= t_max_y) {
      c.ix += step_x;
      t_enter = t_max_x;
      t_max_x += t_delta_x;
    } else {
      c.iy += step_y;
      t_enter = t_max_y;
      t_max_y += t_delta_y;
    }
    if (!grid.contains(c)) {
      return;
    }
  }
}

/// Traverses the segment a -> b. Cells are visited as in traverse_ray.
template<class Visitor>
void traverse_segment(
  const GridGeometry & grid, const Point2 & a, const Point2 & b, Visitor && visit)
{
  const double len = distance(a, b);
  const double angle = std::atan2(b.y - a.y, b.x - a.x);
  traverse_ray(grid, a, angle, len, visit);
}

}  // namespace cbrn

#endif  // CBRN__COMMON__RAYTRACE_HPP_
