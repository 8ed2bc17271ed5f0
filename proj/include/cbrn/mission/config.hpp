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

#ifndef CBRN__MISSION__CONFIG_HPP_
#define CBRN__MISSION__CONFIG_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "cbrn/explore/frontier.hpp"
#include "cbrn/mapping/occupancy_grid.hpp"
#include "cbrn/manipulation/routine.hpp"
#include "cbrn/nav/costmap.hpp"
#include "cbrn/nav/follower.hpp"
#include "cbrn/nav/planner.hpp"
#include "cbrn/world/world.hpp"

namespace cbrn::mission
{

struct SensorConfig
{
  int scan_beams{180};
  double scan_range{4.0};
  double scan_period{0.2};
  double geiger_period{0.5};
  /// Max pose/reading time offset accepted when pairing.
  double sync_skew{0.05};
};

struct RadiationConfig
{
  bool enabled{true};
  double lengthscale{0.3};
  /// <= 0 selects the data-driven default.
  double signal_var{0.0};
  double noise_var{-1.0};
  bool sqrt_transform{false};
  int refit_samples{25};
  double refit_period{5.0};
  int max_samples{2000};
};

struct NavConfig
{
  nav::CostmapParams costmap;   // robot_radius comes from the world
  nav::PlannerParams planner;
  nav::FollowerParams follower;
  double collision_threshold{0.1};
  double backtrack_distance{0.3};
  double backtrack_timeout{6.0};
  /// Fraction of commanded speed lost to wheel slip (uniform draw).
  double slip{0.05};
  /// Collisions tolerated on one goal before it is dropped.
  int max_recoveries_per_goal{3};
  double goal_timeout{120.0};
};

struct ExploreConfig
{
  bool enabled{true};
  explore::ExplorationParams params;
  /// Extra distance kept between goal cells and obstacles, beyond the
  /// collision threshold.
  double goal_clearance{0.05};
};

struct ArbitrationConfig
{
  double cooldown{5.0};
  double heartbeat_timeout{2.0};
  /// A teleop message keeps the operator in control this long.
  double teleop_hold{0.25};
  bool return_home_when_done{true};
};

struct ManipulationConfig
{
  manipulation::RoutineParams routine;
  int tray_capacity{2};
  int analyzer_capacity{1};
  double step_duration{1.0};
};

struct Probe
{
  std::string name;
  Point2 position;
};

struct MissionConfig
{
  world::WorldConfig world;
  double tick_dt{0.05};
  double max_time{600.0};
  double publish_period{0.1};
  SensorConfig sensors;
  mapping::MappingParams mapping;
  RadiationConfig radiation;
  NavConfig nav;
  ExploreConfig explore;
  ArbitrationConfig arbitration;
  ManipulationConfig manipulation;
  std::vector<Probe> probes;
  std::string log_path;

  /// Self-contained JSON form (world inlined); parses back to the same config.
  nlohmann::json to_json() const;
};

/// Throws ConfigError with a JSON pointer to the offending field. A string
/// "world" is a scenario file path, resolved against base_dir.
MissionConfig mission_config_from_json(const nlohmann::json & j, const std::string & base_dir = ".");
MissionConfig load_mission_config(const std::string & path);

}  // namespace cbrn::mission

#endif  // CBRN__MISSION__CONFIG_HPP_
