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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cbrn/arbitration/arbitration.hpp"

namespace cbrn::arbitration
{
namespace
{

const VelocityCmd kTeleop{0.2, 0.1};
const VelocityCmd kPlan{0.5, -0.3};

TEST(VelocityMux, TeleopBeatsPlanner)
{
  const auto d = velocity_mux(kTeleop, kPlan, 1.0, {});
  EXPECT_EQ(d.source, VelocitySource::kTeleop);
  EXPECT_EQ(d.cmd.v, 0.2);
  EXPECT_EQ(d.state.cooldown_until, 6.0);
}

TEST(VelocityMux, PlannerPassesWithoutTeleop)
{
  const auto d = velocity_mux(std::nullopt, kPlan, 1.0, {});
  EXPECT_EQ(d.source, VelocitySource::kPlanner);
  EXPECT_EQ(d.reason, MuxReason::kPlanner);
  EXPECT_EQ(d.cmd.w, -0.3);
  const auto idle = velocity_mux(std::nullopt, std::nullopt, 1.0, {});
  EXPECT_EQ(idle.reason, MuxReason::kIdle);
  EXPECT_EQ(idle.cmd.v, 0.0);
}

TEST(VelocityMux, CooldownAfterLastTeleop)
{
  // Teleop until t = 10, then the planner is held for five seconds.
  MuxState s;
  double now = 0.0;
  const double dt = 0.05;
  for (int k = 0; k <= 200; ++k) {
    now = k * dt;
    s = velocity_mux(kTeleop, kPlan, now, s).state;
  }
  for (int k = 201; k <= 400; ++k) {
    now = k * dt;
    const auto d = velocity_mux(std::nullopt, kPlan, now, s);
    s = d.state;
    if (now < 15.0 - 1e-6) {
      EXPECT_EQ(d.reason, MuxReason::kSuppressed) << now;
      EXPECT_EQ(d.cmd.v, 0.0);
      EXPECT_EQ(d.cmd.w, 0.0);
    } else {
      EXPECT_EQ(d.reason, MuxReason::kPlanner) << now;
    }
  }
}

TEST(VelocityMux, TeleopInsideCooldownRestartsIt)
{
  MuxState s = velocity_mux(kTeleop, kPlan, 0.0, {}).state;
  s = velocity_mux(kTeleop, kPlan, 3.0, s).state;
  EXPECT_EQ(velocity_mux(std::nullopt, kPlan, 7.0, s).reason, MuxReason::kSuppressed);
  EXPECT_EQ(velocity_mux(std::nullopt, kPlan, 8.0, s).reason, MuxReason::kPlanner);
}

TEST(GoalMux, PriorityOrder)
{
  EXPECT_TRUE(outranks(GoalSource::kReturn, GoalSource::kPreempt));
  EXPECT_TRUE(outranks(GoalSource::kPreempt, GoalSource::kUser));
  EXPECT_TRUE(outranks(GoalSource::kUser, GoalSource::kExploration));
  EXPECT_FALSE(outranks(GoalSource::kUser, GoalSource::kUser));
}

TEST(GoalMux, UserOverExploration)
{
  const std::map<GoalSource, Pose2D> offers{
    {GoalSource::kExploration, {1, 1, 0}}, {GoalSource::kUser, {2, 2, 0}}};
  const auto d = goal_mux(offers, std::nullopt);
  ASSERT_TRUE(d.active);
  EXPECT_EQ(d.active->source, GoalSource::kUser);
  EXPECT_EQ(d.active->pose.x, 2.0);
  EXPECT_TRUE(d.adopted);
  EXPECT_FALSE(d.cancelled);
}

TEST(GoalMux, LowerOfferKeepsActive)
{
  const ActiveGoal user{{2, 2, 0}, GoalSource::kUser};
  const auto d = goal_mux({{GoalSource::kExploration, {1, 1, 0}}}, user);
  EXPECT_EQ(d.active->source, GoalSource::kUser);
  EXPECT_FALSE(d.adopted);
  EXPECT_EQ(d.winner, GoalSource::kExploration);
}

TEST(GoalMux, EqualPriorityReplaces)
{
  const ActiveGoal user{{2, 2, 0}, GoalSource::kUser};
  const auto d = goal_mux({{GoalSource::kUser, {3, 3, 0}}}, user);
  EXPECT_EQ(d.active->pose.x, 3.0);
  EXPECT_TRUE(d.adopted);
  EXPECT_TRUE(d.cancelled);
}

TEST(GoalMux, PreemptClearsGoal)
{
  const ActiveGoal user{{2, 2, 0}, GoalSource::kUser};
  const auto d = goal_mux({{GoalSource::kPreempt, {}}, {GoalSource::kUser, {4, 4, 0}}}, user);
  EXPECT_FALSE(d.active);
  EXPECT_TRUE(d.cancelled);
  EXPECT_FALSE(d.adopted);
}

TEST(GoalMux, ReturnBeatsEverything)
{
  const ActiveGoal user{{2, 2, 0}, GoalSource::kUser};
  const auto d = goal_mux(
    {{GoalSource::kReturn, {0, 0, 0}}, {GoalSource::kPreempt, {}}, {GoalSource::kUser, {4, 4, 0}}}, user);
  EXPECT_EQ(d.active->source, GoalSource::kReturn);
}

TEST(GoalMux, ReturnNeverDisplacedByLowerGoals)
{
  std::mt19937_64 rng(2);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 500; ++trial) {
    std::optional<ActiveGoal> active = ActiveGoal{{0, 0, 0}, GoalSource::kReturn};
    for (int step = 0; step < 20; ++step) {
      std::map<GoalSource, Pose2D> offers;
      if (coin(rng)) {
        offers[GoalSource::kUser] = {1, 1, 0};
      }
      if (coin(rng)) {
        offers[GoalSource::kExploration] = {2, 2, 0};
      }
      active = goal_mux(offers, active).active;
      ASSERT_TRUE(active);
      ASSERT_EQ(active->source, GoalSource::kReturn);
    }
  }
}

TEST(Watchdog, UnarmedNeverFires)
{
  LinkState link;
  for (int k = 0; k < 1000; ++k) {
    EXPECT_FALSE(watchdog_tick(link, k * 0.05, {}));
  }
  EXPECT_FALSE(link.connected);
}

TEST(Watchdog, FiresOnceAfterTimeoutAndRearms)
{
  LinkState link;
  const Pose2D home{1, 2, 0};
  const double dt = 0.05;
  int fired = 0;
  double fired_at = -1.0;
  for (int k = 0; k <= 1000; ++k) {
    const double now = k * dt;
    if (k % 10 == 0 && now <= 30.0 + 1e-9) {
      record_heartbeat(link, now);
    }
    if (const auto g = watchdog_tick(link, now, home)) {
      ++fired;
      fired_at = now;
      EXPECT_EQ(g->source, GoalSource::kReturn);
      EXPECT_EQ(g->pose.y, 2.0);
    }
    if (now <= 32.0 + 1e-9) {
      EXPECT_TRUE(link.connected) << now;
    }
  }
  EXPECT_EQ(fired, 1);
  EXPECT_GT(fired_at, 32.0);
  EXPECT_LE(fired_at, 32.0 + dt + 1e-9);
  // A new heartbeat reconnects; the next loss fires again.
  record_heartbeat(link, 60.0);
  EXPECT_FALSE(watchdog_tick(link, 61.0, home));
  EXPECT_TRUE(watchdog_tick(link, 62.5, home));
  EXPECT_FALSE(watchdog_tick(link, 63.0, home));
}

TEST(Override, RisingEdgeOnly)
{
  OverrideState s;
  EXPECT_FALSE(manual_override(false, s).preempt);
  auto e = manual_override(true, s);
  EXPECT_TRUE(e.preempt);
  EXPECT_TRUE(e.route_teleop);
  e = manual_override(true, s);
  EXPECT_FALSE(e.preempt);
  EXPECT_TRUE(e.route_teleop);
  e = manual_override(false, s);
  EXPECT_FALSE(e.preempt);
  EXPECT_FALSE(e.route_teleop);
  EXPECT_TRUE(manual_override(true, s).preempt);
}

TEST(Names, GoalSourceRoundTrip)
{
  for (auto s : {GoalSource::kReturn, GoalSource::kPreempt, GoalSource::kUser, GoalSource::kExploration}) {
    EXPECT_EQ(goal_source_from_string(to_string(s)), s);
  }
}

}  // namespace
}  // namespace cbrn::arbitration
