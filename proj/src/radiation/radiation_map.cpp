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

#include "cbrn/radiation/radiation_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "cbrn/common/errors.hpp"
#include "cbrn/mapping/map_io.hpp"

namespace cbrn::radiation
{

std::size_t RadiationMap::argmax_mean() const
{
  return static_cast<std::size_t>(std::distance(mean.begin(), std::max_element(mean.begin(), mean.end())));
}

RadiationMap render_radiation_map(const GpModel & model, const GridGeometry & geometry)
{
  RadiationMap out;
  out.geometry = geometry;
  out.mean.resize(geometry.size());
  out.variance.resize(geometry.size());
  out.prior_mean = model.to_rate_space({model.prior_mean(), 0.0}).mean;
  out.prior_variance = model.prior_variance();
  const auto n = static_cast<std::ptrdiff_t>(geometry.size());
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const GpPrediction p = model.to_rate_space(model.predict_latent(geometry.center(k), scratch));
      out.mean[k] = p.mean;
      out.variance[k] = p.variance;
    }
  }
  return out;
}

RadiationMap render_radiation_map_serial(const GpModel & model, const GridGeometry & geometry)
{
  RadiationMap out;
  out.geometry = geometry;
  out.mean.reserve(geometry.size());
  out.variance.reserve(geometry.size());
  out.prior_mean = model.to_rate_space({model.prior_mean(), 0.0}).mean;
  out.prior_variance = model.prior_variance();
  for (std::size_t i = 0; i < geometry.size(); ++i) {
    const auto c = geometry.center(i);
    const GpPrediction p = gp_predict(model, Pose2D{c.x, c.y, 0.0});
    out.mean.push_back(p.mean);
    out.variance.push_back(p.variance);
  }
  return out;
}

RadiationMap align_maps(const RadiationMap & rad, const GridGeometry & target, const Pose2D & offset)
{
  if (!std::isfinite(offset.x) || !std::isfinite(offset.y) || !std::isfinite(offset.theta)) {
    throw InvalidParams("alignment offset must be finite");
  }
  RadiationMap out;
  out.geometry = target;
  out.prior_mean = rad.prior_mean;
  out.prior_variance = rad.prior_variance;
  out.mean.resize(target.size());
  out.variance.resize(target.size());

  const Point2 pivot = rad.geometry.to_world({rad.geometry.width_m() / 2.0, rad.geometry.height_m() / 2.0});
  const double c = std::cos(-offset.theta);
  const double s = std::sin(-offset.theta);
  for (std::size_t i = 0; i < target.size(); ++i) {
    const Point2 p = target.center(i);
    const double rx = p.x - offset.x - pivot.x;
    const double ry = p.y - offset.y - pivot.y;
    const Point2 q{pivot.x + c * rx - s * ry, pivot.y + s * rx + c * ry};
    const auto src = rad.geometry.checked_cell_of(q);
    if (src) {
      const std::size_t k = rad.geometry.index(*src);
      out.mean[i] = rad.mean[k];
      out.variance[i] = rad.variance[k];
    } else {
      out.mean[i] = rad.prior_mean;
      out.variance[i] = rad.prior_variance;
    }
  }
  return out;
}

std::vector<std::uint8_t> quantize(const std::vector<double> & values, double scale)
{
  std::vector<std::uint8_t> out(values.size(), 0);
  if (!(scale > 0.0)) {
    return out;
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = std::clamp(values[i] / scale, 0.0, 1.0);
    out[i] = static_cast<std::uint8_t>(std::lround(255.0 * v));
  }
  return out;
}

namespace
{

double max_or_zero(const std::vector<double> & v)
{
  double m = 0.0;
  for (double x : v) {
    m = std::max(m, x);
  }
  return m;
}

/// Black -> red -> yellow -> white.
void heat_color(double t, std::uint8_t rgb[3])
{
  t = std::clamp(t, 0.0, 1.0);
  const double r = std::clamp(3.0 * t, 0.0, 1.0);
  const double g = std::clamp(3.0 * t - 1.0, 0.0, 1.0);
  const double b = std::clamp(3.0 * t - 2.0, 0.0, 1.0);
  rgb[0] = static_cast<std::uint8_t>(std::lround(255.0 * r));
  rgb[1] = static_cast<std::uint8_t>(std::lround(255.0 * g));
  rgb[2] = static_cast<std::uint8_t>(std::lround(255.0 * b));
}

}  // namespace

void export_radiation(const std::string & stem, const RadiationMap & map)
{
  std::vector<double> display(map.mean.size());
  for (std::size_t i = 0; i < display.size(); ++i) {
    display[i] = map.display_mean(i);
  }
  const double mean_scale = max_or_zero(display);
  const double var_scale = max_or_zero(map.variance);
  mapping::write_plain_pgm(stem + "_mean.pgm", map.geometry, quantize(display, mean_scale));
  mapping::write_plain_pgm(stem + "_variance.pgm", map.geometry, quantize(map.variance, var_scale));

  nlohmann::json side = mapping::geometry_to_json(map.geometry);
  side["mean_scale"] = mean_scale;
  side["variance_scale"] = var_scale;
  side["prior_mean"] = map.prior_mean;
  side["prior_variance"] = map.prior_variance;
  side["mean"] = map.mean;
  side["variance"] = map.variance;
  std::ofstream out(stem + ".json");
  if (!out) {
    throw Error("cannot open " + stem + ".json for writing");
  }
  out << side.dump() << "\n";
}

void write_heatmap_ppm(
  const std::string & path, const RadiationMap & map, const mapping::OccupancyGrid * occupancy)
{
  const auto & g = map.geometry;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open " + path + " for writing");
  }
  double scale = 0.0;
  for (std::size_t i = 0; i < map.mean.size(); ++i) {
    scale = std::max(scale, map.display_mean(i));
  }
  out << "P6\n" << g.width << " " << g.height << "\n255\n";
  for (int iy = g.height - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < g.width; ++ix) {
      const std::size_t i = g.index({ix, iy});
      std::uint8_t heat[3];
      heat_color(scale > 0.0 ? map.display_mean(i) / scale : 0.0, heat);
      if (occupancy == nullptr || !(occupancy->geometry() == g)) {
        out.write(reinterpret_cast<const char *>(heat), 3);
        continue;
      }
      const double base = 255.0 * (1.0 - occupancy->probability(i));
      const double alpha = map.prior_variance > 0.0 ?
        std::clamp(1.0 - map.variance[i] / map.prior_variance, 0.0, 1.0) : 1.0;
      char px[3];
      for (int k = 0; k < 3; ++k) {
        px[k] = static_cast<char>(std::lround(alpha * heat[k] + (1.0 - alpha) * base));
      }
      out.write(px, 3);
    }
  }
}

}  // namespace cbrn::radiation
