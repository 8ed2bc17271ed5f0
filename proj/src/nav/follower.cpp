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

#include "cbrn/nav/follower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbrn::nav
{

double project_onto_path(const Path & path, const Point2 & p)
{
  if (path.poses.empty()) {
    return 0.0;
  }
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  double s0 = 0.0;
  for (std::size_t i = 0; i + 1 < path.poses.size(); ++i) {
    const Point2 a = path.poses[i].position();
    const Point2 b = path.poses[i + 1].position();
    const double ex = b.x - a.x;
    const double ey = b.y - a.y;
    const double len2 = ex * ex + ey * ey;
    double u = 0.0;
    if (len2 > 0.0) {
      u = std::clamp(((p.x - a.x) * ex + (p.y - a.y) * ey) / len2, 0.0, 1.0);
    }
    const double qx = a.x + u * ex - p.x;
    const double qy = a.y + u * ey - p.y;
    const double d2 = qx * qx + qy * qy;
    const double len = std::sqrt(len2);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_s = s0 + u * len;
    }
    s0 += len;
  }
  return best_s;
}

Point2 point_at_arc(const Path & path, double s)
{
  if (path.poses.empty()) {
    return {};
  }
  if (s <= 0.0) {
    return path.poses.front().position();
  }
  double s0 = 0.0;
  for (std::size_t i = 0; i + 1 < path.poses.size(); ++i) {
    const Point2 a = path.poses[i].position();
    const Point2 b = path.poses[i + 1].position();
    const double len = distance(a, b);
    if (s <= s0 + len && len > 0.0) {
      const double u = (s - s0) / len;
      return {a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)};
    }
    s0 += len;
  }
  return path.poses.back().position();
}

Point2 lookahead_point(const Path & path, const Pose2D & pose, double lookahead)
{
  return point_at_arc(path, project_onto_path(path, pose.position()) + lookahead);
}

FollowResult follow(const Path & path, const Pose2D & pose, const FollowerParams & params, bool reverse)
{
  FollowResult out;
  if (path.poses.empty()) {
    out.reached = true;
    return out;
  }
  const Pose2D & goal = path.poses.back();
  const double heading = reverse ? normalize_angle(pose.theta + std::numbers::pi) : pose.theta;

  if (distance(pose, goal) <= params.goal_tolerance_xy) {
    if (reverse || !params.check_heading) {
      out.reached = true;
      return out;
    }
    const double err = normalize_angle(goal.theta - pose.theta);
    if (std::abs(err) <= params.goal_tolerance_theta) {
      out.reached = true;
      return out;
    }
    out.cmd.w = std::copysign(params.w_max, err);
    return out;
  }

  const Point2 target = lookahead_point(path, pose, params.lookahead);
  const double gx = target.x - pose.x;
  const double gy = target.y - pose.y;
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  const double dx = c * gx + s * gy;
  const double dy = -s * gx + c * gy;
  const double alpha = std::atan2(dy, dx);

  double v = 0.0;
  double w = 0.0;
  if (std::abs(alpha) > params.rotate_in_place) {
    w = std::copysign(params.w_max, alpha);
  } else {
    const double l2 = dx * dx + dy * dy;
    const double kappa = l2 > 0.0 ? 2.0 * dy / l2 : 0.0;
    v = params.v_max;
    w = v * kappa;
    if (std::abs(w) > params.w_max) {
      v = params.w_max / std::abs(kappa);
      w = std::copysign(params.w_max, kappa);
    }
  }
  out.cmd = {reverse ? -v : v, w};
  return out;
}

}  // namespace cbrn::nav
