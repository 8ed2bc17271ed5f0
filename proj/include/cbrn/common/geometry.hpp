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

#ifndef CBRN__COMMON__GEOMETRY_HPP_
#define CBRN__COMMON__GEOMETRY_HPP_

#include <cmath>
#include <numbers>

namespace cbrn
{

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r <= 0.0) {
    r += two_pi;
  }
  return r - std::numbers::pi;
}

struct Point2
{
  double x{0.0};
  double y{0.0};

  friend bool operator==(const Point2 &, const Point2 &) = default;
};

inline double distance(const Point2 & a, const Point2 & b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Planar pose in the world frame. theta is kept in (-pi, pi].
struct Pose2D
{
  double x{0.0};
  double y{0.0};
  double theta{0.0};

  Point2 position() const {return {x, y};}

  friend bool operator==(const Pose2D &, const Pose2D &) = default;
};

inline Pose2D make_pose(double x, double y, double theta)
{
  return {x, y, normalize_angle(theta)};
}

inline double distance(const Pose2D & a, const Pose2D & b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Unicycle command: forward speed (m/s) and yaw rate (rad/s).
struct VelocityCmd
{
  double v{0.0};
  double w{0.0};

  bool is_zero() const {return v == 0.0 && w == 0.0;}

  friend bool operator==(const VelocityCmd &, const VelocityCmd &) = default;
};

}  // namespace cbrn

#endif  // CBRN__COMMON__GEOMETRY_HPP_
