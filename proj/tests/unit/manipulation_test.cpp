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
#include <numbers>

#include <gtest/gtest.h>

#include "cbrn/common/errors.hpp"
#include "cbrn/manipulation/routine.hpp"

namespace cbrn::manipulation
{
namespace
{

RoutineEvent ev(RoutineEventType t)
{
  RoutineEvent e;
  e.type = t;
  return e;
}

const RoutineEvent kTrigger = ev(RoutineEventType::kOperatorTrigger);
const RoutineEvent kDone = ev(RoutineEventType::kStepDone);

/// Runs every step with trigger/done pairs; returns the step names seen.
std::vector<std::string> run_through(Routine & r, Inventory & inv)
{
  const auto body = default_body();
  std::vector<std::string> names;
  while (r.status == RoutineStatus::kWaitingOperator || r.status == RoutineStatus::kRefining) {
    r = advance(r, kTrigger, body, inv);
    if (r.status != RoutineStatus::kRunningStep) {
      break;
    }
    names.push_back(r.steps[r.cursor].name);
    r = advance(r, kDone, body, inv);
  }
  return names;
}

TEST(Grip, Boundary)
{
  EXPECT_EQ(select_grip(0.10), Grip::kExternal);
  EXPECT_EQ(select_grip(0.160), Grip::kExternal);
  EXPECT_EQ(select_grip(0.1600001), Grip::kInternal);
  EXPECT_EQ(select_grip(0.20), Grip::kInternal);
  EXPECT_THROW(select_grip(0.0), InvalidParams);
  EXPECT_THROW(select_grip(-1.0), InvalidParams);
  EXPECT_THROW(select_grip(std::nan("")), InvalidParams);
}

TEST(Routine, SampleToTraySequence)
{
  auto r = plan_routine(RoutineName::kSampleToTray);
  EXPECT_EQ(r.status, RoutineStatus::kWaitingOperator);
  Inventory inv;
  const auto names = run_through(r, inv);
  EXPECT_EQ(names, (std::vector<std::string>{"retrieve_probe", "present", "swipe", "move_to_tray", "deposit"}));
  EXPECT_EQ(r.status, RoutineStatus::kDone);
  EXPECT_EQ(inv.tray, 1);
}

TEST(Routine, SampleToAnalyzerSequence)
{
  auto r = plan_routine(RoutineName::kSampleToAnalyzer);
  Inventory inv;
  const auto names = run_through(r, inv);
  EXPECT_EQ(names.back(), "analyze");
  EXPECT_EQ(inv.analyzer, 1);
  EXPECT_EQ(inv.tray, 0);
  auto again = plan_routine(RoutineName::kSampleToAnalyzer);
  run_through(again, inv);
  EXPECT_EQ(again.status, RoutineStatus::kFault);
  EXPECT_EQ(again.fault_reason, "analyzer_full");
}

TEST(Routine, PresentStepHeight)
{
  const auto r = plan_routine(RoutineName::kSampleToTray);
  EXPECT_DOUBLE_EQ(r.steps[1].height, 0.10);
  EXPECT_DOUBLE_EQ(r.steps[2].height, 0.10);
}

TEST(Routine, TrayFullFaultsBeforeDeposit)
{
  Inventory inv;
  inv.tray = inv.tray_capacity;
  auto r = plan_routine(RoutineName::kSampleToTray);
  const auto names = run_through(r, inv);
  EXPECT_EQ(names.back(), "move_to_tray");
  EXPECT_EQ(r.status, RoutineStatus::kFault);
  EXPECT_EQ(r.fault_reason, "tray_full");
  EXPECT_EQ(inv.tray, inv.tray_capacity);
}

TEST(Routine, ValveGripChoice)
{
  RoutineParams p;
  p.valve_diameter = 0.10;
  EXPECT_EQ(plan_routine(RoutineName::kValveTurn, p).valve.grip, Grip::kExternal);
  p.valve_diameter = 0.20;
  EXPECT_EQ(plan_routine(RoutineName::kValveTurn, p).valve.grip, Grip::kInternal);
}

TEST(Routine, ValveTurnRepeatsQuarterTurns)
{
  RoutineParams p;
  p.quarter_turns = 3;
  auto r = plan_routine(RoutineName::kValveTurn, p);
  Inventory inv;
  const auto names = run_through(r, inv);
  EXPECT_EQ(names, (std::vector<std::string>{"approach", "grip", "rotate", "rotate", "rotate"}));
  EXPECT_EQ(inv.quarter_turns, 3);
  EXPECT_TRUE(inv.valve_turned);
  EXPECT_EQ(r.status, RoutineStatus::kDone);
}

TEST(Routine, RefineMovesNextStep)
{
  const auto body = default_body();
  Inventory inv;
  auto r = plan_routine(RoutineName::kSampleToTray);
  r = advance(r, kTrigger, body, inv);
  r = advance(r, kDone, body, inv);  // retrieve_probe
  EXPECT_THROW(advance(r, ev(RoutineEventType::kRefine), body, inv), IllegalEvent);
  r = advance(r, kTrigger, body, inv);
  r = advance(r, kDone, body, inv);  // present
  ASSERT_EQ(r.status, RoutineStatus::kRefining);
  const auto before = r.steps[r.cursor].tcp_path;
  RoutineEvent refine = ev(RoutineEventType::kRefine);
  refine.delta = {0.01, -0.02, 0.0};
  r = advance(r, refine, body, inv);
  EXPECT_EQ(r.status, RoutineStatus::kRefining);
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_NEAR(r.steps[r.cursor].tcp_path[i].x, before[i].x + 0.01, 1e-12);
    EXPECT_NEAR(r.steps[r.cursor].tcp_path[i].y, before[i].y - 0.02, 1e-12);
  }
  r = advance(r, kTrigger, body, inv);
  EXPECT_EQ(r.status, RoutineStatus::kRunningStep);
}

TEST(Routine, RefinePathRotatesAboutFirstPoint)
{
  const std::vector<Point2> path{{1, 1}, {2, 1}, {2, 3}};
  const auto out = refine_path(path, {0.5, 0.0, std::numbers::pi / 2});
  EXPECT_NEAR(out[0].x, 1.5, 1e-12);
  EXPECT_NEAR(out[0].y, 1.0, 1e-12);
  EXPECT_NEAR(out[1].x, 1.5, 1e-12);
  EXPECT_NEAR(out[1].y, 2.0, 1e-12);
  EXPECT_NEAR(out[2].x, -0.5, 1e-12);
  EXPECT_NEAR(out[2].y, 2.0, 1e-12);
}

TEST(Routine, EventsRejectedPerStatus)
{
  const auto body = default_body();
  Inventory inv;
  auto r = plan_routine(RoutineName::kSampleToTray);
  EXPECT_THROW(advance(r, kDone, body, inv), IllegalEvent);
  r = advance(r, kTrigger, body, inv);
  EXPECT_THROW(advance(r, kTrigger, body, inv), IllegalEvent);
  EXPECT_THROW(advance(r, ev(RoutineEventType::kRefine), body, inv), IllegalEvent);
  Routine idle;
  EXPECT_THROW(advance(idle, kTrigger, body, inv), IllegalEvent);
  EXPECT_THROW(advance(idle, ev(RoutineEventType::kFault), body, inv), IllegalEvent);
}

TEST(Routine, FaultAndReset)
{
  const auto body = default_body();
  Inventory inv;
  auto r = plan_routine(RoutineName::kValveTurn);
  r = advance(r, kTrigger, body, inv);
  RoutineEvent f = ev(RoutineEventType::kFault);
  f.reason = "stall";
  r = advance(r, f, body, inv);
  EXPECT_EQ(r.status, RoutineStatus::kFault);
  EXPECT_EQ(r.fault_reason, "stall");
  EXPECT_THROW(advance(r, kTrigger, body, inv), IllegalEvent);
  r = advance(r, ev(RoutineEventType::kReset), body, inv);
  EXPECT_EQ(r.status, RoutineStatus::kIdle);
  EXPECT_EQ(r.name, RoutineName::kValveTurn);
}

TEST(Routine, RefineIntoBodyFaults)
{
  const auto body = default_body();
  Inventory inv;
  auto r = plan_routine(RoutineName::kSampleToTray);
  for (int k = 0; k < 2; ++k) {
    r = advance(r, kTrigger, body, inv);
    r = advance(r, kDone, body, inv);
  }
  RoutineEvent refine = ev(RoutineEventType::kRefine);
  refine.delta = {-0.4, 0.0, 0.0};
  r = advance(r, refine, body, inv);
  r = advance(r, kTrigger, body, inv);
  EXPECT_EQ(r.status, RoutineStatus::kFault);
  EXPECT_EQ(r.fault_reason, "self_contamination");
}

TEST(SelfContamination, BoundaryIsNotInterior)
{
  const auto body = default_body();
  EXPECT_FALSE(point_in_polygon_interior(body, {0.3, 0.0}));
  EXPECT_FALSE(point_in_polygon_interior(body, {0.3, 0.2}));
  EXPECT_TRUE(point_in_polygon_interior(body, {0.29, 0.0}));
  RoutineStep along;
  along.tcp_path = {{0.3, -0.2}, {0.3, 0.2}};
  EXPECT_TRUE(check_self_contamination(along, body));
  RoutineStep through;
  through.tcp_path = {{0.5, 0.0}, {0.5, 0.3}, {-0.5, 0.3}, {-0.5, -0.1}, {0.5, -0.1}};
  EXPECT_FALSE(check_self_contamination(through, body));
  RoutineStep corner;
  corner.tcp_path = {{0.4, 0.3}, {0.2, 0.1}};
  EXPECT_FALSE(check_self_contamination(corner, body));
  RoutineStep graze;
  graze.tcp_path = {{0.4, 0.1}, {0.2, 0.3}};  // touches the corner only
  EXPECT_TRUE(check_self_contamination(graze, body));
}

TEST(SelfContamination, PlannedRoutinesAreClean)
{
  const auto body = default_body();
  for (auto n : {RoutineName::kSampleToTray, RoutineName::kSampleToAnalyzer, RoutineName::kValveTurn}) {
    for (const auto & s : plan_routine(n).steps) {
      EXPECT_TRUE(check_self_contamination(s, body)) << to_string(n) << " " << s.name;
    }
  }
}

TEST(Names, RoundTrip)
{
  for (auto n : {RoutineName::kSampleToTray, RoutineName::kSampleToAnalyzer, RoutineName::kValveTurn}) {
    EXPECT_EQ(routine_name_from_string(to_string(n)), n);
  }
  EXPECT_THROW(routine_name_from_string("DANCE"), InvalidParams);
}

}  // namespace
}  // namespace cbrn::manipulation
