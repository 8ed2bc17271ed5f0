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

#ifndef CBRN__WORLD__WORLD_HPP_
#define CBRN__WORLD__WORLD_HPP_

#include <cstdint>
#include <vector>

#include "cbrn/common/geometry.hpp"
#include "cbrn/common/grid.hpp"
#include "cbrn/common/rng.hpp"
#include "cbrn/common/sensors.hpp"

namespace cbrn::world
{

/// Point emitter. `intensity` is the expected count rate at 1 m with no
/// shielding (counts * m^2 / s).
struct RadiationSource
{
  Point2 position;
  double intensity{0.0};
};

/// Ground truth for one scenario.
struct WorldConfig
{
  GridGeometry geometry;
  std::vector<std::uint8_t> occupied;  // 1 = wall, per cell, linear index
  std::vector<RadiationSource> sources;
  double background_rate{0.0};
  double attenuation_coeff{0.0};  // per occupied cell crossed
  double robot_radius{0.2};
  Pose2D start_pose{};
  std::uint64_t seed{0};

  /// Throws InvalidParams naming the offending field.
  void validate() const;
};

using cbrn::GeigerReading;
using cbrn::RangeScan;

/// Unicycle update without collision handling.
Pose2D integrate_unicycle(const Pose2D & pose, const VelocityCmd & cmd, double dt);

/// Beam angles in the robot frame, evenly spaced over [-pi, pi).
std::vector<double> beam_angles(int n_beams);

class World
{
public:
  explicit World(WorldConfig config);

  const WorldConfig & config() const {return config_;}
  const GridGeometry & geometry() const {return config_.geometry;}

  /// Cells outside the grid count as occupied.
  bool occupied(const Cell & c) const;

  /// True when a disc of the robot radius at p overlaps no occupied cell.
  bool footprint_free(const Point2 & p) const;

  /// Advances the robot. Velocities are scaled by (1 - slip * u) with u a
  /// draw from the motion stream; motion stops at first contact.
  Pose2D step_robot(const Pose2D & pose, const VelocityCmd & cmd, double dt, double slip);

  /// step_robot with an explicit velocity scale and no random draw.
  Pose2D step_robot_scaled(
    const Pose2D & pose, const VelocityCmd & cmd, double dt,
    double scale) const;

  RangeScan raycast_scan(const Pose2D & pose, int n_beams, double max_range) const;
  /// Single-threaded reference for raycast_scan.
  RangeScan raycast_scan_serial(const Pose2D & pose, int n_beams, double max_range) const;

  /// Distance to the first occupied cell along a world-frame ray.
  double cast_ray(const Point2 & from, double world_angle, double max_range) const;

  /// Occupied cells strictly between a and b (endpoint cells excluded).
  int shielding_cells(const Point2 & a, const Point2 & b) const;

  /// Expected Geiger count rate at p (counts/s).
  double expected_rate(const Point2 & p) const;

  GeigerReading sample_geiger(const Pose2D & pose, double dwell);

private:
  void require_inside(const Point2 & p) const;

  WorldConfig config_;
  CounterRng motion_rng_;
  CounterRng geiger_rng_;
};

}  // namespace cbrn::world

#endif  // CBRN__WORLD__WORLD_HPP_
