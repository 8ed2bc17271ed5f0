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

#ifndef CBRN__MAPPING__OCCUPANCY_GRID_HPP_
#define CBRN__MAPPING__OCCUPANCY_GRID_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "cbrn/common/grid.hpp"
#include "cbrn/common/sensors.hpp"

namespace cbrn::mapping
{

/// Inverse sensor model and classification thresholds.
struct MappingParams
{
  double l_occ{0.85};
  double l_free{-0.4};
  double clamp{4.0};
  double p_free{0.25};
  double p_occ{0.65};
};

inline double logodds_to_probability(double l) {return 1.0 / (1.0 + std::exp(-l));}

enum class CellState : std::uint8_t
{
  kFree = 0,
  kOccupied = 1,
  kUnknown = 2,
};

struct TriStateGrid
{
  GridGeometry geometry;
  std::vector<CellState> cells;

  CellState at(const Cell & c) const {return cells[geometry.index(c)];}
  CellState at(std::size_t i) const {return cells[i];}
};

/// Log-odds occupancy map. Unobserved cells hold 0 (p = 0.5).
class OccupancyGrid
{
public:
  OccupancyGrid() = default;
  OccupancyGrid(const GridGeometry & geometry, double clamp = 4.0);

  const GridGeometry & geometry() const {return geometry_;}
  double clamp() const {return clamp_;}

  double logodds(std::size_t i) const {return logodds_[i];}
  double logodds(const Cell & c) const {return logodds_[geometry_.index(c)];}
  double probability(std::size_t i) const {return logodds_to_probability(logodds_[i]);}
  double probability(const Cell & c) const {return probability(geometry_.index(c));}

  /// Adds `delta` to a cell and clamps.
  void update(std::size_t i, double delta);

  const std::vector<double> & data() const {return logodds_;}

  /// Known-pose log-odds update for every beam of `scan`. Throws
  /// OutOfBounds when the scan pose lies outside the map.
  void integrate(const RangeScan & scan, const MappingParams & params);

private:
  GridGeometry geometry_;
  double clamp_{4.0};
  std::vector<double> logodds_;
};

/// Functional form of OccupancyGrid::integrate.
OccupancyGrid integrate_scan(OccupancyGrid map, const RangeScan & scan, const MappingParams & params);

/// Labels each cell FREE (p <= p_free), OCCUPIED (p >= p_occ) or UNKNOWN.
/// Requires 0 < p_free < p_occ < 1.
TriStateGrid classify(const OccupancyGrid & map, double p_free, double p_occ);

}  // namespace cbrn::mapping

#endif  // CBRN__MAPPING__OCCUPANCY_GRID_HPP_
