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

#ifndef CBRN__RADIATION__RADIATION_MAP_HPP_
#define CBRN__RADIATION__RADIATION_MAP_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbrn/common/grid.hpp"
#include "cbrn/mapping/occupancy_grid.hpp"
#include "cbrn/radiation/gp.hpp"

namespace cbrn::radiation
{

/// Per-cell posterior mean and variance of the count rate, on the
/// geometry of the occupancy map. `mean` keeps raw (possibly negative)
/// values; display_mean() clamps them.
struct RadiationMap
{
  GridGeometry geometry;
  std::vector<double> mean;
  std::vector<double> variance;
  double prior_mean{0.0};
  double prior_variance{0.0};

  double display_mean(std::size_t i) const {return mean[i] < 0.0 ? 0.0 : mean[i];}

  /// Index of the largest mean; lowest index wins ties.
  std::size_t argmax_mean() const;
};

/// Evaluates the model at every cell center. Cells are processed in
/// parallel; the result is identical to render_radiation_map_serial.
RadiationMap render_radiation_map(const GpModel & model, const GridGeometry & geometry);

/// Reference implementation: one gp_predict per cell, single thread.
RadiationMap render_radiation_map_serial(const GpModel & model, const GridGeometry & geometry);

/// Resamples `rad` onto `target` after moving it by `offset`: a rotation by
/// offset.theta about the center of the radiation grid followed by the
/// translation (offset.x, offset.y). Nearest-cell lookup; cells that fall
/// outside the source map take the prior.
RadiationMap align_maps(const RadiationMap & rad, const GridGeometry & target, const Pose2D & offset);

/// 8-bit quantization used by the raster exports: round(255 * v / scale).
std::vector<std::uint8_t> quantize(const std::vector<double> & values, double scale);

/// Writes `<stem>_mean.pgm`, `<stem>_variance.pgm` and `<stem>.json`
/// (geometry, quantization scales and the raw per-cell values).
void export_radiation(const std::string & stem, const RadiationMap & map);

/// Heatmap of the mean as binary PPM (P6). With an occupancy map, the
/// heat is blended over it with opacity falling as variance grows.
void write_heatmap_ppm(
  const std::string & path, const RadiationMap & map,
  const mapping::OccupancyGrid * occupancy = nullptr);

}  // namespace cbrn::radiation

#endif  // CBRN__RADIATION__RADIATION_MAP_HPP_
