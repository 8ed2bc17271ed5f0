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

#ifndef CBRN__NAV__RECOVERY_HPP_
#define CBRN__NAV__RECOVERY_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "cbrn/common/geometry.hpp"
#include "cbrn/common/sensors.hpp"
#include "cbrn/nav/follower.hpp"
#include "cbrn/nav/planner.hpp"

namespace cbrn::nav
{

inline constexpr double kCollisionThreshold = 0.1;
inline constexpr double kBacktrackDistance = 0.3;
inline constexpr int kMaxReplanAttempts = 3;

/// True iff any return is closer than footprint_radius + threshold.
bool check_collision(const RangeScan & scan, double footprint_radius, double threshold = kCollisionThreshold);

enum class RecoveryPhase
{
  kFollowing,
  kCollisionBacktrack,
  kClearing,
  kReplanning,
  kAborted,
  kReached,
};

struct RecoveryState
{
  RecoveryPhase phase{RecoveryPhase::kFollowing};
  int attempt{0};  // 1..3 while replanning, 0 otherwise

  friend bool operator==(const RecoveryState &, const RecoveryState &) = default;
};

enum class NavEvent
{
  kCollision,
  kBacktrackDone,
  kCleared,
  kPlanOk,
  kPlanFail,
  kReached,
};

enum class NavAction
{
  kBacktrack,      // reverse along the travel log
  kClearCostmap,   // rebuild the static layer from the current map
  kReplan,
  kFollow,
  kAbortGoal,
  kStop,
};

struct RecoveryStep
{
  RecoveryState state;
  std::vector<NavAction> actions;
};

/// One transition of the recovery machine; IllegalTransition for any
/// (state, event) pair off the graph.
RecoveryStep recovery_step(const RecoveryState & state, NavEvent event);

std::string to_string(RecoveryPhase phase);
std::string to_string(NavEvent event);
std::string to_string(NavAction action);
RecoveryPhase recovery_phase_from_string(const std::string & s);
NavEvent nav_event_from_string(const std::string & s);

struct LoggedPose
{
  double t{0.0};
  Pose2D pose;
  double arc{0.0};  // cumulative distance travelled at this entry
};

/// Fixed-capacity history of traversed poses.
class TravelLog
{
public:
  explicit TravelLog(std::size_t capacity = 4096);

  /// Appends unless the pose is closer than `min_spacing` to the last entry.
  void append(double t, const Pose2D & pose, double min_spacing = 0.0);
  void clear();

  std::size_t size() const {return count_;}
  bool empty() const {return count_ == 0;}
  std::size_t capacity() const {return buf_.size();}
  /// i = 0 is the oldest retained entry.
  const LoggedPose & at(std::size_t i) const;
  const LoggedPose & back() const {return at(count_ - 1);}
  double total_arc() const {return empty() ? 0.0 : back().arc;}

  /// Poses from the newest entry back `distance` meters of arc, newest
  /// first. The last pose is interpolated to lie exactly `distance` back,
  /// or is the oldest entry when the log is shorter.
  Path backtrack_path(double distance) const;

  /// Arc length of the closest point of the logged polyline to p, looking
  /// at most `lookback` meters behind the newest entry.
  double project(const Point2 & p, double lookback) const;

private:
  std::vector<LoggedPose> buf_;
  std::size_t head_{0};   // index of the oldest entry
  std::size_t count_{0};
};

/// Drives a backtrack: reverse pure pursuit along the log tail captured at
/// the collision.
class Backtracker
{
public:
  Backtracker() = default;
  Backtracker(const TravelLog & log, double distance, double resolution, double start_time, double timeout);

  bool active() const {return active_;}
  const Path & path() const {return path_;}
  double target() const {return target_;}
  /// Arc length along the backtrack path already covered by `pose`.
  double progress(const Pose2D & pose) const;
  /// Follower settings for the reverse drive: the goal tolerance sits inside
  /// the completion band so the robot keeps moving until done() holds.
  FollowerParams follower(const FollowerParams & base) const;
  /// Done once progress reaches target minus half a cell, or on timeout.
  bool done(const Pose2D & pose, double now) const;
  void finish() {active_ = false;}

private:
  Path path_;
  double target_{0.0};
  double tolerance_{0.0};
  double deadline_{0.0};
  bool active_{false};
};

}  // namespace cbrn::nav

#endif  // CBRN__NAV__RECOVERY_HPP_
