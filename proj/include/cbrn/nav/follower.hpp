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

#ifndef CBRN__NAV__FOLLOWER_HPP_
#define CBRN__NAV__FOLLOWER_HPP_

#include <numbers>

#include "cbrn/common/geometry.hpp"
#include "cbrn/nav/planner.hpp"

namespace cbrn::nav
{

struct FollowerParams
{
  double lookahead{0.4};
  double v_max{0.5};
  double w_max{1.0};
  double goal_tolerance_xy{0.10};
  double goal_tolerance_theta{0.25};
  /// Above this heading error the follower turns in place.
  double rotate_in_place{std::numbers::pi / 3.0};
  /// When false the final heading is not checked.
  bool check_heading{true};
};

struct FollowResult
{
  VelocityCmd cmd;
  bool reached{false};
};

/// Closest point of the waypoint polyline to p, as arc length from the
/// first waypoint. Ties go to the earliest segment.
double project_onto_path(const Path & path, const Point2 & p);

/// Point at arc length s along the polyline, clamped to its ends.
Point2 point_at_arc(const Path & path, double s);

/// Lookahead target: `lookahead` meters past the projection of `pose`.
Point2 lookahead_point(const Path & path, const Pose2D & pose, double lookahead);

/// Pure pursuit toward the lookahead point. In reverse mode the robot
/// drives backwards (v <= 0) and the final heading is ignored.
FollowResult follow(const Path & path, const Pose2D & pose, const FollowerParams & params = {}, bool reverse = false);

}  // namespace cbrn::nav

#endif  // CBRN__NAV__FOLLOWER_HPP_
