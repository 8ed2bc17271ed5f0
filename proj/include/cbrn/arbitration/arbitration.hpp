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

#ifndef CBRN__ARBITRATION__ARBITRATION_HPP_
#define CBRN__ARBITRATION__ARBITRATION_HPP_

#include <limits>
#include <map>
#include <optional>
#include <string>

#include "cbrn/common/geometry.hpp"

namespace cbrn::arbitration
{

inline constexpr double kCooldown = 5.0;
inline constexpr double kHeartbeatTimeout = 2.0;
/// Slack on sim-time comparisons (s).
inline constexpr double kTimeTolerance = 1e-9;

enum class VelocitySource
{
  kTeleop,   // high
  kPlanner,  // low
  kNone,
};

/// Lower value = higher priority.
enum class GoalSource
{
  kReturn = 0,
  kPreempt = 1,
  kUser = 2,
  kExploration = 3,
};

bool outranks(GoalSource a, GoalSource b);

struct MuxState
{
  VelocitySource active_source{VelocitySource::kNone};
  double cooldown_until{-std::numeric_limits<double>::infinity()};
};

enum class MuxReason
{
  kTeleop,
  kPlanner,
  kSuppressed,  // inside the cooldown after teleop
  kIdle,        // nothing offered
};

struct VelocityDecision
{
  VelocityCmd cmd;
  VelocitySource source{VelocitySource::kNone};
  MuxReason reason{MuxReason::kIdle};
  MuxState state;
};

/// Teleop wins and restarts the cooldown; inside the cooldown the output
/// is a zero command; afterwards the planner passes.
VelocityDecision velocity_mux(
  const std::optional<VelocityCmd> & teleop, const std::optional<VelocityCmd> & planner, double now,
  const MuxState & state, double cooldown = kCooldown);

struct ActiveGoal
{
  Pose2D pose;
  GoalSource source{GoalSource::kUser};
};

struct GoalDecision
{
  std::optional<ActiveGoal> active;
  std::optional<GoalSource> winner;  // highest-priority offer, if any
  bool adopted{false};               // active goal replaced by the winner
  bool cancelled{false};             // previous goal dropped
};

/// Highest-priority offer wins. It replaces the active goal when it ranks
/// at least as high as the active goal's source. PREEMPT drops the active
/// goal, whatever its source, and sets nothing.
GoalDecision goal_mux(const std::map<GoalSource, Pose2D> & offers, const std::optional<ActiveGoal> & current);

struct LinkState
{
  bool connected{false};
  /// Becomes true with the first heartbeat; an unarmed link never fires.
  bool armed{false};
  /// A RETURN goal was emitted for the current loss.
  bool fired{false};
  double last_heartbeat{-std::numeric_limits<double>::infinity()};
  double timeout{kHeartbeatTimeout};
};

void record_heartbeat(LinkState & link, double now);

/// Updates connectivity (connected iff now - last_heartbeat <= timeout)
/// and returns a RETURN goal to `home` once per loss edge.
std::optional<ActiveGoal> watchdog_tick(LinkState & link, double now, const Pose2D & home);

struct OverrideState
{
  bool teleop_active{false};
};

struct OverrideEffects
{
  bool preempt{false};       // inject PREEMPT into the goal mux
  bool route_teleop{false};  // velocity comes from the operator
};

/// Rising edge of teleop activity preempts the active goal.
OverrideEffects manual_override(bool teleop_active, OverrideState & state);

std::string to_string(VelocitySource s);
std::string to_string(GoalSource s);
std::string to_string(MuxReason r);
GoalSource goal_source_from_string(const std::string & s);

}  // namespace cbrn::arbitration

#endif  // CBRN__ARBITRATION__ARBITRATION_HPP_
