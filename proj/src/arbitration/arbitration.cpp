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

#include "cbrn/arbitration/arbitration.hpp"

#include "cbrn/common/errors.hpp"

namespace cbrn::arbitration
{

bool outranks(GoalSource a, GoalSource b)
{
  return static_cast<int>(a) < static_cast<int>(b);
}

VelocityDecision velocity_mux(
  const std::optional<VelocityCmd> & teleop, const std::optional<VelocityCmd> & planner, double now,
  const MuxState & state, double cooldown)
{
  VelocityDecision out;
  out.state = state;
  if (teleop) {
    out.cmd = *teleop;
    out.source = VelocitySource::kTeleop;
    out.reason = MuxReason::kTeleop;
    out.state.active_source = VelocitySource::kTeleop;
    out.state.cooldown_until = now + cooldown;
    return out;
  }
  // Sim time is k * dt; the tolerance absorbs its rounding.
  if (now + kTimeTolerance < state.cooldown_until) {
    out.source = VelocitySource::kNone;
    out.reason = MuxReason::kSuppressed;
    out.state.active_source = VelocitySource::kNone;
    return out;
  }
  if (planner) {
    out.cmd = *planner;
    out.source = VelocitySource::kPlanner;
    out.reason = MuxReason::kPlanner;
    out.state.active_source = VelocitySource::kPlanner;
    return out;
  }
  out.state.active_source = VelocitySource::kNone;
  return out;
}

GoalDecision goal_mux(const std::map<GoalSource, Pose2D> & offers, const std::optional<ActiveGoal> & current)
{
  GoalDecision out;
  out.active = current;
  if (offers.empty()) {
    return out;
  }
  // std::map orders by enum value, which is the priority order.
  const auto & [source, pose] = *offers.begin();
  out.winner = source;
  if (source == GoalSource::kPreempt) {
    out.cancelled = current.has_value();
    out.active.reset();
    return out;
  }
  if (!current || !outranks(current->source, source)) {
    out.cancelled = current.has_value();
    out.active = ActiveGoal{pose, source};
    out.adopted = true;
  }
  return out;
}

void record_heartbeat(LinkState & link, double now)
{
  link.armed = true;
  link.last_heartbeat = now;
  link.connected = true;
  link.fired = false;
}

std::optional<ActiveGoal> watchdog_tick(LinkState & link, double now, const Pose2D & home)
{
  if (!link.armed) {
    link.connected = false;
    return std::nullopt;
  }
  link.connected = now - link.last_heartbeat <= link.timeout + kTimeTolerance;
  if (link.connected || link.fired) {
    return std::nullopt;
  }
  link.fired = true;
  return ActiveGoal{home, GoalSource::kReturn};
}

OverrideEffects manual_override(bool teleop_active, OverrideState & state)
{
  OverrideEffects out;
  out.preempt = teleop_active && !state.teleop_active;
  out.route_teleop = teleop_active;
  state.teleop_active = teleop_active;
  return out;
}

std::string to_string(VelocitySource s)
{
  switch (s) {
    case VelocitySource::kTeleop: return "TELEOP";
    case VelocitySource::kPlanner: return "PLANNER";
    case VelocitySource::kNone: return "NONE";
  }
  return "?";
}

std::string to_string(GoalSource s)
{
  switch (s) {
    case GoalSource::kReturn: return "RETURN";
    case GoalSource::kPreempt: return "PREEMPT";
    case GoalSource::kUser: return "USER";
    case GoalSource::kExploration: return "EXPLORATION";
  }
  return "?";
}

std::string to_string(MuxReason r)
{
  switch (r) {
    case MuxReason::kTeleop: return "teleop";
    case MuxReason::kPlanner: return "planner";
    case MuxReason::kSuppressed: return "suppressed";
    case MuxReason::kIdle: return "idle";
  }
  return "?";
}

GoalSource goal_source_from_string(const std::string & s)
{
  for (auto g : {GoalSource::kReturn, GoalSource::kPreempt, GoalSource::kUser, GoalSource::kExploration}) {
    if (to_string(g) == s) {
      return g;
    }
  }
  throw InvalidParams("unknown goal source '" + s + "'");
}

}  // namespace cbrn::arbitration
