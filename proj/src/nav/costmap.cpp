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

#include "cbrn/nav/costmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cbrn/common/errors.hpp"

namespace cbrn::nav
{

using mapping::CellState;

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_lethal_source(CellState s, const CostmapParams & params)
{
  return s == CellState::kOccupied || (params.unknown_lethal && s == CellState::kUnknown);
}

/// Gap (in cells) between a cell center and the edge of a cell `offset`
/// cells away along one axis.
double edge_gap(int offset)
{
  return offset == 0 ? 0.0 : std::abs(offset) - 0.5;
}

double sq(double x) {return x * x;}

void validate(const CostmapParams & params)
{
  if (!(params.padding >= 0.0) || !(params.robot_radius >= 0.0)) {
    throw InvalidParams("padding and robot radius must be >= 0");
  }
  if (!(params.inflation_radius >= params.padding)) {
    throw InvalidParams("inflation radius must be >= padding");
  }
}

int window_cells(const CostmapParams & params, double resolution)
{
  const double reach = std::max(params.inflation_radius, params.inscribed_radius());
  return static_cast<int>(std::ceil(reach / resolution)) + 1;
}

Costmap finish(
  const mapping::TriStateGrid & tri, const CostmapParams & params,
  const std::vector<double> & dist_cells)
{
  Costmap out;
  out.geometry = tri.geometry;
  out.inscribed_radius = params.inscribed_radius();
  out.cost.resize(tri.cells.size());
  const double res = tri.geometry.resolution;
  for (std::size_t i = 0; i < out.cost.size(); ++i) {
    const CellState s = tri.cells[i];
    if (is_lethal_source(s, params)) {
      out.cost[i] = kLethalCost;
      continue;
    }
    std::uint8_t c = inflation_cost(dist_cells[i] * res, params);
    if (s == CellState::kUnknown) {
      c = std::max(c, params.unknown_cost);
    }
    out.cost[i] = c;
  }
  return out;
}

}  // namespace

std::uint8_t inflation_cost(double d, const CostmapParams & params)
{
  if (d <= 0.0) {
    return kLethalCost;
  }
  if (d <= params.inscribed_radius()) {
    return kInscribedCost;
  }
  if (d > params.inflation_radius) {
    return kFreeCost;
  }
  const double c = kMaxInflatedCost * std::exp(-params.decay * (d - params.inscribed_radius()));
  return static_cast<std::uint8_t>(std::floor(c));
}

Costmap build_costmap(const mapping::TriStateGrid & tri, const CostmapParams & params)
{
  validate(params);
  const auto & g = tri.geometry;
  const int w = g.width;
  const int h = g.height;
  const int window = window_cells(params, g.resolution);

  // Pass 1: squared edge gap to the nearest lethal cell in the same row.
  std::vector<double> row_sq(g.size(), kInf);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < h; ++iy) {
    int last = std::numeric_limits<int>::min() / 2;
    for (int ix = 0; ix < w; ++ix) {
      if (is_lethal_source(tri.cells[g.index({ix, iy})], params)) {
        last = ix;
      }
      const int gap = ix - last;
      if (gap <= window) {
        row_sq[g.index({ix, iy})] = sq(edge_gap(gap));
      }
    }
    last = std::numeric_limits<int>::max() / 2;
    for (int ix = w - 1; ix >= 0; --ix) {
      if (is_lethal_source(tri.cells[g.index({ix, iy})], params)) {
        last = ix;
      }
      const int gap = last - ix;
      if (gap <= window) {
        auto & v = row_sq[g.index({ix, iy})];
        v = std::min(v, sq(edge_gap(gap)));
      }
    }
  }

  // Pass 2: combine rows within the window.
  std::vector<double> dist(g.size(), kInf);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < h; ++iy) {
    const int y0 = std::max(0, iy - window);
    const int y1 = std::min(h - 1, iy + window);
    for (int ix = 0; ix < w; ++ix) {
      double best = kInf;
      for (int ky = y0; ky <= y1; ++ky) {
        const double v = row_sq[g.index({ix, ky})];
        if (v == kInf) {
          continue;
        }
        best = std::min(best, v + sq(edge_gap(ky - iy)));
      }
      dist[g.index({ix, iy})] = std::sqrt(best);
    }
  }
  return finish(tri, params, dist);
}

Costmap build_costmap_reference(const mapping::TriStateGrid & tri, const CostmapParams & params)
{
  validate(params);
  const auto & g = tri.geometry;
  const int window = window_cells(params, g.resolution);
  std::vector<double> dist(g.size(), kInf);
  for (int iy = 0; iy < g.height; ++iy) {
    for (int ix = 0; ix < g.width; ++ix) {
      double best = kInf;
      for (int ky = std::max(0, iy - window); ky <= std::min(g.height - 1, iy + window); ++ky) {
        for (int kx = std::max(0, ix - window); kx <= std::min(g.width - 1, ix + window); ++kx) {
          if (!is_lethal_source(tri.cells[g.index({kx, ky})], params)) {
            continue;
          }
          const double gx = edge_gap(kx - ix);
          const double gy = edge_gap(ky - iy);
          best = std::min(best, gx * gx + gy * gy);
        }
      }
      dist[g.index({ix, iy})] = std::sqrt(best);
    }
  }
  return finish(tri, params, dist);
}

Costmap build_costmap(const mapping::TriStateGrid & tri, double padding, double inflation_radius)
{
  CostmapParams params;
  params.padding = padding;
  params.inflation_radius = inflation_radius;
  return build_costmap(tri, params);
}

}  // namespace cbrn::nav
