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

#include "cbrn/nav/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cbrn/common/errors.hpp"
#include "cbrn/nav/follower.hpp"

namespace cbrn::nav
{

bool check_collision(const RangeScan & scan, double footprint_radius, double threshold)
{
  const double limit = footprint_radius + threshold;
  return std::any_of(scan.ranges.begin(), scan.ranges.end(), [&](double r) {return r < limit;});
}

namespace
{

[[noreturn]] void illegal(const RecoveryState & s, NavEvent e)
{
  throw IllegalTransition("no transition from " + to_string(s.phase) + " on " + to_string(e));
}

}  // namespace

RecoveryStep recovery_step(const RecoveryState & state, NavEvent event)
{
  using P = RecoveryPhase;
  using E = NavEvent;
  switch (state.phase) {
    case P::kFollowing:
      if (event == E::kCollision) {
        return {{P::kCollisionBacktrack, 0}, {NavAction::kBacktrack}};
      }
      if (event == E::kReached) {
        return {{P::kReached, 0}, {NavAction::kStop}};
      }
      break;
    case P::kCollisionBacktrack:
      if (event == E::kBacktrackDone) {
        return {{P::kClearing, 0}, {NavAction::kClearCostmap}};
      }
      break;
    case P::kClearing:
      if (event == E::kCleared) {
        return {{P::kReplanning, 1}, {NavAction::kReplan}};
      }
      break;
    case P::kReplanning:
      if (event == E::kPlanOk) {
        return {{P::kFollowing, 0}, {NavAction::kFollow}};
      }
      if (event == E::kPlanFail) {
        if (state.attempt >= kMaxReplanAttempts) {
          return {{P::kAborted, 0}, {NavAction::kAbortGoal, NavAction::kStop}};
        }
        return {{P::kReplanning, state.attempt + 1}, {NavAction::kReplan}};
      }
      break;
    case P::kAborted:
    case P::kReached:
      break;
  }
  illegal(state, event);
}

std::string to_string(RecoveryPhase phase)
{
  switch (phase) {
    case RecoveryPhase::kFollowing: return "FOLLOWING";
    case RecoveryPhase::kCollisionBacktrack: return "COLLISION_BACKTRACK";
    case RecoveryPhase::kClearing: return "CLEARING";
    case RecoveryPhase::kReplanning: return "REPLANNING";
    case RecoveryPhase::kAborted: return "ABORTED";
    case RecoveryPhase::kReached: return "REACHED";
  }
  return "?";
}

std::string to_string(NavEvent event)
{
  switch (event) {
    case NavEvent::kCollision: return "collision";
    case NavEvent::kBacktrackDone: return "backtrack_done";
    case NavEvent::kCleared: return "cleared";
    case NavEvent::kPlanOk: return "plan_ok";
    case NavEvent::kPlanFail: return "plan_fail";
    case NavEvent::kReached: return "reached";
  }
  return "?";
}

std::string to_string(NavAction action)
{
  switch (action) {
    case NavAction::kBacktrack: return "backtrack";
    case NavAction::kClearCostmap: return "clear_costmap";
    case NavAction::kReplan: return "replan";
    case NavAction::kFollow: return "follow";
    case NavAction::kAbortGoal: return "abort_goal";
    case NavAction::kStop: return "stop";
  }
  return "?";
}

RecoveryPhase recovery_phase_from_string(const std::string & s)
{
  for (auto p : {RecoveryPhase::kFollowing, RecoveryPhase::kCollisionBacktrack, RecoveryPhase::kClearing,
      RecoveryPhase::kReplanning, RecoveryPhase::kAborted, RecoveryPhase::kReached})
  {
    if (to_string(p) == s) {
      return p;
    }
  }
  throw InvalidParams("unknown recovery state '" + s + "'");
}

NavEvent nav_event_from_string(const std::string & s)
{
  for (auto e : {NavEvent::kCollision, NavEvent::kBacktrackDone, NavEvent::kCleared, NavEvent::kPlanOk,
      NavEvent::kPlanFail, NavEvent::kReached})
  {
    if (to_string(e) == s) {
      return e;
    }
  }
  throw InvalidParams("unknown navigation event '" + s + "'");
}

TravelLog::TravelLog(std::size_t capacity)
: buf_(std::max<std::size_t>(capacity, 2))
{
}

void TravelLog::append(double t, const Pose2D & pose, double min_spacing)
{
  double arc = 0.0;
  if (count_ > 0) {
    const LoggedPose & last = back();
    const double step = distance(last.pose, pose);
    if (step < min_spacing) {
      return;
    }
    if (t < last.t) {
      throw InvalidParams("travel log timestamps must not decrease");
    }
    arc = last.arc + step;
  }
  const std::size_t slot = (head_ + count_) % buf_.size();
  buf_[slot] = {t, pose, arc};
  if (count_ < buf_.size()) {
    ++count_;
  } else {
    head_ = (head_ + 1) % buf_.size();
  }
}

void TravelLog::clear()
{
  head_ = 0;
  count_ = 0;
}

const LoggedPose & TravelLog::at(std::size_t i) const
{
  if (i >= count_) {
    throw OutOfBounds("travel log index out of range");
  }
  return buf_[(head_ + i) % buf_.size()];
}

Path TravelLog::backtrack_path(double dist) const
{
  Path out;
  if (empty()) {
    return out;
  }
  const double stop = total_arc() - dist;
  for (std::size_t k = count_; k-- > 0; ) {
    const LoggedPose & e = at(k);
    if (e.arc > stop || out.poses.empty()) {
      out.poses.push_back(e.pose);
      continue;
    }
    // e is at or past the stop arc: interpolate between e and the previous pose.
    const LoggedPose & prev = at(k + 1);
    const double span = prev.arc - e.arc;
    const double u = span > 0.0 ? (prev.arc - stop) / span : 1.0;
    Pose2D p;
    p.x = prev.pose.x + u * (e.pose.x - prev.pose.x);
    p.y = prev.pose.y + u * (e.pose.y - prev.pose.y);
    p.theta = e.pose.theta;
    out.poses.push_back(p);
    break;
  }
  out.cost = out.length();
  return out;
}

double TravelLog::project(const Point2 & p, double lookback) const
{
  if (empty()) {
    return 0.0;
  }
  const double stop = total_arc() - lookback;
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_arc = back().arc;
  {
    const double dx = back().pose.x - p.x;
    const double dy = back().pose.y - p.y;
    best_d2 = dx * dx + dy * dy;
  }
  for (std::size_t k = count_ - 1; k-- > 0; ) {
    const LoggedPose & a = at(k);
    const LoggedPose & b = at(k + 1);
    const double ex = b.pose.x - a.pose.x;
    const double ey = b.pose.y - a.pose.y;
    const double len2 = ex * ex + ey * ey;
    double u = 0.0;
    if (len2 > 0.0) {
      u = std::clamp(((p.x - a.pose.x) * ex + (p.y - a.pose.y) * ey) / len2, 0.0, 1.0);
    }
    const double qx = a.pose.x + u * ex - p.x;
    const double qy = a.pose.y + u * ey - p.y;
    const double d2 = qx * qx + qy * qy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best_arc = a.arc + u * (b.arc - a.arc);
    }
    if (a.arc <= stop) {
      break;
    }
  }
  return best_arc;
}

Backtracker::Backtracker(
  const TravelLog & log, double dist, double resolution, double start_time, double timeout)
: path_(log.backtrack_path(dist)),
  target_(path_.length()),
  tolerance_(0.5 * resolution),
  deadline_(start_time + timeout),
  active_(true)
{
}

FollowerParams Backtracker::follower(const FollowerParams & base) const
{
  FollowerParams p = base;
  p.goal_tolerance_xy = std::min(base.goal_tolerance_xy, 0.5 * tolerance_);
  p.check_heading = false;
  return p;
}

double Backtracker::progress(const Pose2D & pose) const
{
  return project_onto_path(path_, pose.position());
}

bool Backtracker::done(const Pose2D & pose, double now) const
{
  if (path_.poses.size() < 2) {
    return true;
  }
  return now >= deadline_ || progress(pose) >= target_ - tolerance_;
}

}  // namespace cbrn::nav
