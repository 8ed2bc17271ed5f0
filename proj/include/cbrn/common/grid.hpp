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

#ifndef CBRN__COMMON__GRID_HPP_
#define CBRN__COMMON__GRID_HPP_

#include <cmath>
#include <cstddef>
#include <optional>

#include "cbrn/common/geometry.hpp"

namespace cbrn
{

struct Cell
{
  int ix{0};
  int iy{0};

  friend bool operator==(const Cell &, const Cell &) = default;
};

/// Shared raster geometry: cell (0,0) has its lower-left corner at
/// `origin`, x grows with ix, y with iy. Linear index is iy * width + ix.
struct GridGeometry
{
  double resolution{0.05};
  int width{0};
  int height{0};
  Pose2D origin{};

  std::size_t size() const
  {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  bool valid() const {return resolution > 0.0 && width > 0 && height > 0;}

  bool contains(const Cell & c) const
  {
    return c.ix >= 0 && c.iy >= 0 && c.ix < width && c.iy < height;
  }

  std::size_t index(const Cell & c) const
  {
    return static_cast<std::size_t>(c.iy) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(c.ix);
  }

  Cell cell(std::size_t index) const
  {
    return {static_cast<int>(index % static_cast<std::size_t>(width)),
      static_cast<int>(index / static_cast<std::size_t>(width))};
  }

  /// World point expressed in the grid frame (meters, unrotated).
  Point2 to_local(const Point2 & p) const
  {
    const double dx = p.x - origin.x;
    const double dy = p.y - origin.y;
    if (origin.theta == 0.0) {
      return {dx, dy};
    }
    const double c = std::cos(origin.theta);
    const double s = std::sin(origin.theta);
    return {c * dx + s * dy, -s * dx + c * dy};
  }

  Point2 to_world(const Point2 & local) const
  {
    if (origin.theta == 0.0) {
      return {origin.x + local.x, origin.y + local.y};
    }
    const double c = std::cos(origin.theta);
    const double s = std::sin(origin.theta);
    return {origin.x + c * local.x - s * local.y, origin.y + s * local.x + c * local.y};
  }

  /// Cell containing p; may be outside the grid.
  Cell cell_of(const Point2 & p) const
  {
    const Point2 l = to_local(p);
    return {static_cast<int>(std::floor(l.x / resolution)),
      static_cast<int>(std::floor(l.y / resolution))};
  }

  std::optional<Cell> checked_cell_of(const Point2 & p) const
  {
    const Cell c = cell_of(p);
    if (!contains(c)) {
      return std::nullopt;
    }
    return c;
  }

  bool contains(const Point2 & p) const {return contains(cell_of(p));}

  Point2 center(const Cell & c) const
  {
    return to_world({(c.ix + 0.5) * resolution, (c.iy + 0.5) * resolution});
  }

  Point2 center(std::size_t index) const {return center(cell(index));}

  double width_m() const {return width * resolution;}
  double height_m() const {return height * resolution;}

  friend bool operator==(const GridGeometry &, const GridGeometry &) = default;
};

}  // namespace cbrn

#endif  // CBRN__COMMON__GRID_HPP_
