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

#include "cbrn/world/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "cbrn/common/errors.hpp"
#include "cbrn/common/raytrace.hpp"

namespace cbrn::world
{

void WorldConfig::validate() const
{
  if (!(geometry.resolution > 0.0)) {
    throw InvalidParams("resolution must be > 0");
  }
  if (geometry.width <= 0 || geometry.height <= 0) {
    throw InvalidParams("grid must be non-empty");
  }
  if (occupied.size() != geometry.size()) {
    throw InvalidParams("grid cell count does not match width * height");
  }
  if (!(background_rate >= 0.0)) {
    throw InvalidParams("background_rate must be >= 0");
  }
  if (!(attenuation_coeff >= 0.0)) {
    throw InvalidParams("attenuation_coeff must be >= 0");
  }
  if (!(robot_radius > 0.0)) {
    throw InvalidParams("robot_radius must be > 0");
  }
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (!(sources[i].intensity >= 0.0)) {
      throw InvalidParams("sources[" + std::to_string(i) + "].intensity must be >= 0");
    }
    if (!geometry.contains(sources[i].position)) {
      throw InvalidParams("sources[" + std::to_string(i) + "] lies outside the grid");
    }
  }
}

Pose2D integrate_unicycle(const Pose2D & pose, const VelocityCmd & cmd, double dt)
{
  const double dtheta = cmd.w * dt;
  double x = pose.x;
  double y = pose.y;
  if (std::abs(dtheta) < 1e-9) {
    const double mid = pose.theta + 0.5 * dtheta;
    x += cmd.v * dt * std::cos(mid);
    y += cmd.v * dt * std::sin(mid);
  } else {
    const double radius = cmd.v / cmd.w;
    x += radius * (std::sin(pose.theta + dtheta) - std::sin(pose.theta));
    y -= radius * (std::cos(pose.theta + dtheta) - std::cos(pose.theta));
  }
  return {x, y, normalize_angle(pose.theta + dtheta)};
}

std::vector<double> beam_angles(int n_beams)
{
  std::vector<double> angles(static_cast<std::size_t>(n_beams));
  for (int i = 0; i < n_beams; ++i) {
    angles[static_cast<std::size_t>(i)] =
      -std::numbers::pi + 2.0 * std::numbers::pi * i / n_beams;
  }
  return angles;
}

World::World(WorldConfig config)
: config_(std::move(config)),
  motion_rng_(config_.seed, RngStream::kMotion),
  geiger_rng_(config_.seed, RngStream::kGeiger)
{
  config_.validate();
}

bool World::occupied(const Cell & c) const
{
  if (!config_.geometry.contains(c)) {
    return true;
  }
  return config_.occupied[config_.geometry.index(c)] != 0;
}

bool World::footprint_free(const Point2 & p) const
{
  const auto & g = config_.geometry;
  const double r = config_.robot_radius;
  const Point2 l = g.to_local(p);
  const int x0 = static_cast<int>(std::floor((l.x - r) / g.resolution));
  const int x1 = static_cast<int>(std::floor((l.x + r) / g.resolution));
  const int y0 = static_cast<int>(std::floor((l.y - r) / g.resolution));
  const int y1 = static_cast<int>(std::floor((l.y + r) / g.resolution));
  for (int iy = y0; iy <= y1; ++iy) {
    for (int ix = x0; ix <= x1; ++ix) {
      if (!occupied({ix, iy})) {
        continue;
      }
      // distance from the disc center to the cell square
      const double cx = std::clamp(l.x, ix * g.resolution, (ix + 1) * g.resolution);
      const double cy = std::clamp(l.y, iy * g.resolution, (iy + 1) * g.resolution);
      if (std::hypot(l.x - cx, l.y - cy) < r) {
        return false;
      }
    }
  }
  return true;
}

Pose2D World::step_robot(const Pose2D & pose, const VelocityCmd & cmd, double dt, double slip)
{
  const double u = motion_rng_.uniform();
  return step_robot_scaled(pose, cmd, dt, 1.0 - slip * u);
}

Pose2D World::step_robot_scaled(
  const Pose2D & pose, const VelocityCmd & cmd, double dt, double scale) const
{
  const VelocityCmd eff{cmd.v * scale, cmd.w * scale};
  const Pose2D target = integrate_unicycle(pose, eff, dt);
  if (eff.v == 0.0) {
    return target;
  }
  if (!footprint_free(pose.position())) {
    // Already in contact: only rotation is allowed.
    return {pose.x, pose.y, target.theta};
  }

  const double travel = std::abs(eff.v) * dt;
  const double sub = config_.geometry.resolution / 4.0;
  const int n = std::max(1, static_cast<int>(std::ceil(travel / sub)));
  double free_s = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double s = static_cast<double>(k) / n;
    if (footprint_free(integrate_unicycle(pose, eff, dt * s).position())) {
      free_s = s;
      continue;
    }
    double lo = free_s;
    double hi = s;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (footprint_free(integrate_unicycle(pose, eff, dt * mid).position())) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return integrate_unicycle(pose, eff, dt * lo);
  }
  return target;
}

void World::require_inside(const Point2 & p) const
{
  if (!config_.geometry.contains(p)) {
    throw OutOfBounds(
            "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
            ") is outside the world grid");
  }
}

double World::cast_ray(const Point2 & from, double world_angle, double max_range) const
{
  double range = max_range;
  traverse_ray(
    config_.geometry, from, world_angle, max_range,
    [&](const Cell & c, double t_enter, double) {
      if (config_.occupied[config_.geometry.index(c)] != 0) {
        range = std::min(t_enter, max_range);
        return false;
      }
      return true;
    });
  return range;
}

RangeScan World::raycast_scan(const Pose2D & pose, int n_beams, double max_range) const
{
  require_inside(pose.position());
  RangeScan scan;
  scan.pose = pose;
  scan.max_range = max_range;
  scan.angles = beam_angles(n_beams);
  scan.ranges.assign(scan.angles.size(), max_range);
  const Point2 origin = pose.position();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_beams; ++i) {
    const auto k = static_cast<std::size_t>(i);
    scan.ranges[k] = cast_ray(origin, pose.theta + scan.angles[k], max_range);
  }
  return scan;
}

RangeScan World::raycast_scan_serial(const Pose2D & pose, int n_beams, double max_range) const
{
  require_inside(pose.position());
  RangeScan scan;
  scan.pose = pose;
  scan.max_range = max_range;
  scan.angles = beam_angles(n_beams);
  scan.ranges.reserve(scan.angles.size());
  for (double a : scan.angles) {
    scan.ranges.push_back(cast_ray(pose.position(), pose.theta + a, max_range));
  }
  return scan;
}

int World::shielding_cells(const Point2 & a, const Point2 & b) const
{
  const auto & g = config_.geometry;
  const Cell first = g.cell_of(a);
  const Cell last = g.cell_of(b);
  int count = 0;
  traverse_segment(
    g, a, b, [&](const Cell & c, double, double) {
      if (c == last) {
        return false;
      }
      if (!(c == first) && config_.occupied[g.index(c)] != 0) {
        ++count;
      }
      return true;
    });
  return count;
}

double World::expected_rate(const Point2 & p) const
{
  const double d_min = config_.geometry.resolution;
  double rate = config_.background_rate;
  for (const auto & src : config_.sources) {
    const double d2 = std::max(
      std::pow(p.x - src.position.x, 2) + std::pow(p.y - src.position.y, 2), d_min * d_min);
    const int shield = shielding_cells(p, src.position);
    rate += src.intensity * std::exp(-config_.attenuation_coeff * shield) / d2;
  }
  return rate;
}

GeigerReading World::sample_geiger(const Pose2D & pose, double dwell)
{
  if (!(dwell > 0.0)) {
    throw InvalidParams("dwell must be > 0");
  }
  require_inside(pose.position());
  const double mean = expected_rate(pose.position()) * dwell;
  GeigerReading reading{pose, 0, dwell};
  // Always consume a draw so the stream position depends only on the
  // number of readings taken.
  const std::uint64_t draw_seed = geiger_rng_();
  if (mean > 0.0) {
    std::mt19937_64 engine(draw_seed);
    std::poisson_distribution<std::int64_t> dist(mean);
    reading.counts = dist(engine);
  }
  return reading;
}

}  // namespace cbrn::world
