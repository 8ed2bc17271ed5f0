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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cbrn/common/errors.hpp"
#include "cbrn/nav/costmap.hpp"
#include "cbrn/nav/follower.hpp"
#include "cbrn/nav/planner.hpp"
#include "cbrn/nav/recovery.hpp"

namespace cbrn::nav
{
namespace
{

using mapping::CellState;
using mapping::TriStateGrid;

TriStateGrid blank(int w, int h, double res, CellState fill = CellState::kFree)
{
  TriStateGrid t;
  t.geometry.width = w;
  t.geometry.height = h;
  t.geometry.resolution = res;
  t.cells.assign(t.geometry.size(), fill);
  return t;
}

TriStateGrid random_tri(std::mt19937_64 & rng, int w, int h)
{
  auto t = blank(w, h, 0.05);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto & c : t.cells) {
    const double r = u(rng);
    c = r < 0.05 ? CellState::kOccupied : (r < 0.1 ? CellState::kUnknown : CellState::kFree);
  }
  return t;
}

/// Distance from point p to the axis-aligned square of cell c.
double dist_to_cell(const GridGeometry & g, const Point2 & p, const Cell & c)
{
  const double x0 = c.ix * g.resolution;
  const double y0 = c.iy * g.resolution;
  const double qx = std::clamp(p.x, x0, x0 + g.resolution);
  const double qy = std::clamp(p.y, y0, y0 + g.resolution);
  return std::hypot(p.x - qx, p.y - qy);
}

TEST(Costmap, InflationCostShape)
{
  CostmapParams p;
  p.robot_radius = 0.15;
  p.padding = 0.05;
  p.inflation_radius = 0.5;
  EXPECT_EQ(inflation_cost(0.0, p), kLethalCost);
  EXPECT_EQ(inflation_cost(0.2, p), kInscribedCost);
  EXPECT_EQ(inflation_cost(0.21, p), static_cast<std::uint8_t>(std::floor(253.0 * std::exp(-0.1))));
  EXPECT_EQ(inflation_cost(0.51, p), kFreeCost);
  std::uint8_t prev = 255;
  for (double d = 0.0; d < 0.7; d += 0.001) {
    const auto c = inflation_cost(d, p);
    EXPECT_LE(c, prev);
    prev = c;
  }
}

TEST(Costmap, SingleObstacleMatchesGeometry)
{
  auto t = blank(31, 31, 0.05);
  const Cell obs{15, 15};
  t.cells[t.geometry.index(obs)] = CellState::kOccupied;
  CostmapParams p;
  p.robot_radius = 0.1;
  p.padding = 0.05;
  p.inflation_radius = 0.6;
  const auto cm = build_costmap(t, p);
  for (std::size_t i = 0; i < t.geometry.size(); ++i) {
    const double d = dist_to_cell(t.geometry, t.geometry.center(i), obs);
    EXPECT_EQ(cm.cost[i], inflation_cost(d, p)) << i;
  }
}

TEST(Costmap, ParallelMatchesReference)
{
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto t = random_tri(rng, 20 + trial % 7, 15 + trial % 11);
    CostmapParams p;
    p.robot_radius = 0.2 * u(rng);
    p.padding = 0.1 * u(rng);
    p.inflation_radius = p.padding + 0.6 * u(rng);
    p.unknown_lethal = trial % 2 == 0;
    EXPECT_EQ(build_costmap(t, p).cost, build_costmap_reference(t, p).cost) << trial;
  }
}

TEST(Costmap, UnknownHandling)
{
  auto t = blank(5, 5, 0.1);
  t.cells[12] = CellState::kUnknown;
  CostmapParams p;
  p.inflation_radius = 0.05;
  EXPECT_EQ(build_costmap(t, p).cost[12], kLethalCost);
  p.unknown_lethal = false;
  p.unknown_cost = 200;
  const auto cm = build_costmap(t, p);
  EXPECT_EQ(cm.cost[12], 200);
  EXPECT_EQ(cm.cost[0], kFreeCost);
}

TEST(Costmap, RejectsBadParams)
{
  const auto t = blank(3, 3, 0.1);
  CostmapParams p;
  p.padding = -0.1;
  EXPECT_THROW(build_costmap(t, p), InvalidParams);
  p.padding = 0.3;
  p.inflation_radius = 0.2;
  EXPECT_THROW(build_costmap(t, p), InvalidParams);
}

Costmap free_costmap(int w, int h, double res)
{
  Costmap c;
  c.geometry.width = w;
  c.geometry.height = h;
  c.geometry.resolution = res;
  c.cost.assign(c.geometry.size(), kFreeCost);
  return c;
}

Pose2D at(const Costmap & c, int ix, int iy, double th = 0.0)
{
  const auto p = c.geometry.center(Cell{ix, iy});
  return {p.x, p.y, th};
}

TEST(Planner, StraightAndDiagonalCosts)
{
  const auto cm = free_costmap(10, 10, 0.1);
  const auto straight = plan(cm, at(cm, 0, 0), at(cm, 7, 0));
  EXPECT_EQ(straight.cells.size(), 8u);
  EXPECT_EQ(straight.cost_units, 7 * 100000);
  const auto diag = plan(cm, at(cm, 0, 0), at(cm, 4, 4));
  EXPECT_EQ(diag.cells.size(), 5u);
  EXPECT_EQ(diag.cost_units, 4 * std::llround(1e5 * std::numbers::sqrt2));
  EXPECT_NEAR(diag.length(), 0.4 * std::numbers::sqrt2, 1e-12);
}

TEST(Planner, StartEqualsGoal)
{
  const auto cm = free_costmap(5, 5, 0.1);
  const auto p = plan(cm, {0.21, 0.22, 0.0}, {0.29, 0.28, 1.0});
  ASSERT_EQ(p.poses.size(), 1u);
  EXPECT_EQ(p.cost_units, 0);
  EXPECT_EQ(p.poses[0].theta, 1.0);
  EXPECT_DOUBLE_EQ(p.poses[0].x, 0.25);
}

TEST(Planner, FinalPoseTakesGoalHeading)
{
  const auto cm = free_costmap(6, 6, 0.1);
  const auto p = plan(cm, at(cm, 0, 0), at(cm, 5, 2, -0.7));
  EXPECT_NEAR(p.poses.back().theta, -0.7, 1e-12);
}

TEST(Planner, Errors)
{
  auto cm = free_costmap(5, 5, 0.1);
  cm.cost[cm.geometry.index(Cell{4, 4})] = kInscribedCost;
  EXPECT_THROW(plan(cm, at(cm, 0, 0), at(cm, 4, 4)), GoalLethal);
  EXPECT_THROW(plan(cm, at(cm, 0, 0), {5.0, 0.0, 0.0}), OutOfBounds);
  for (int iy = 0; iy < 5; ++iy) {
    cm.cost[cm.geometry.index(Cell{2, iy})] = kLethalCost;
  }
  EXPECT_THROW(plan(cm, at(cm, 0, 0), at(cm, 4, 0)), NoPath);
  EXPECT_THROW(plan(cm, at(cm, 2, 1), at(cm, 4, 0)), NoPath);
}

TEST(Planner, DetourThroughGap)
{
  // 5x5 with a wall in column 2 except a gap at the top row.
  auto cm = free_costmap(5, 5, 1.0);
  for (int iy = 0; iy < 4; ++iy) {
    cm.cost[cm.geometry.index(Cell{2, iy})] = kLethalCost;
  }
  const auto p = plan(cm, at(cm, 0, 0), at(cm, 4, 0));
  EXPECT_NE(std::find(p.cells.begin(), p.cells.end(), cm.geometry.index(Cell{2, 4})), p.cells.end());
  // No corner cutting past the wall end: up column 1, across row 4, down
  // column 3, with one diagonal at each end.
  const auto s = std::llround(1e6);
  const auto d = std::llround(1e6 * std::numbers::sqrt2);
  EXPECT_EQ(p.cost_units, 8 * s + 2 * d);
}

TEST(Planner, NoCornerCutting)
{
  auto cm = free_costmap(3, 3, 0.1);
  cm.cost[cm.geometry.index(Cell{1, 0})] = kLethalCost;
  const auto p = plan(cm, at(cm, 0, 0), at(cm, 1, 1));
  EXPECT_EQ(p.cells.size(), 3u);
}

TEST(Planner, RandomPathsAreValid)
{
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    const auto t = random_tri(rng, 30, 30);
    CostmapParams cp;
    cp.robot_radius = 0.05;
    cp.inflation_radius = 0.3;
    cp.unknown_lethal = false;
    const auto cm = build_costmap(t, cp);
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < cm.cost.size(); ++i) {
      if (!cm.blocked(i)) {
        open.push_back(i);
      }
    }
    std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
    const auto s = cm.geometry.center(open[pick(rng)]);
    const auto g = cm.geometry.center(open[pick(rng)]);
    const auto all = cost_to_all(cm, {s.x, s.y, 0.0});
    const auto gi = cm.geometry.index(cm.geometry.cell_of(g));
    Path p;
    try {
      p = plan(cm, {s.x, s.y, 0.0}, {g.x, g.y, 0.0});
    } catch (const NoPath &) {
      EXPECT_EQ(all[gi], kUnreachable);
      continue;
    }
    EXPECT_EQ(p.cost_units, all[gi]);
    std::int64_t sum = 0;
    for (std::size_t k = 0; k < p.cells.size(); ++k) {
      EXPECT_FALSE(cm.blocked(p.cells[k]));
      if (k == 0) {
        continue;
      }
      const auto a = cm.geometry.cell(p.cells[k - 1]);
      const auto b = cm.geometry.cell(p.cells[k]);
      const int dx = b.ix - a.ix;
      const int dy = b.iy - a.iy;
      ASSERT_LE(std::max(std::abs(dx), std::abs(dy)), 1);
      if (dx != 0 && dy != 0) {
        EXPECT_FALSE(cm.blocked(cm.geometry.index(Cell{a.ix + dx, a.iy})));
        EXPECT_FALSE(cm.blocked(cm.geometry.index(Cell{a.ix, a.iy + dy})));
      }
      sum += step_cost_units(cm, p.cells[k], dx != 0 && dy != 0, {});
    }
    EXPECT_EQ(sum, p.cost_units);
    // A heavier cost weight never makes the optimum cheaper.
    const auto heavy = plan(cm, {s.x, s.y, 0.0}, {g.x, g.y, 0.0}, PlannerParams{20.0});
    EXPECT_GE(heavy.cost_units, p.cost_units);
  }
}

Path polyline(std::initializer_list<Point2> pts)
{
  Path p;
  for (const auto & q : pts) {
    p.poses.push_back({q.x, q.y, 0.0});
  }
  return p;
}

TEST(Follower, ProjectionMatchesDenseSampling)
{
  const auto path = polyline({{0, 0}, {1, 0}, {1, 1}, {2, 1.5}, {2.2, 0.2}});
  std::vector<double> seg_len;
  for (std::size_t i = 1; i < path.poses.size(); ++i) {
    seg_len.push_back(distance(path.poses[i - 1], path.poses[i]));
  }
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.5, 2.5);
  for (int trial = 0; trial < 200; ++trial) {
    const Point2 q{u(rng), u(rng)};
    double best_s = 0.0;
    double best_d = 1e18;
    double base = 0.0;
    for (std::size_t i = 0; i + 1 < path.poses.size(); ++i) {
      const auto a = path.poses[i].position();
      const auto b = path.poses[i + 1].position();
      for (int k = 0; k <= 20000; ++k) {
        const double f = k / 20000.0;
        const Point2 m{a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
        const double d = distance(m, q);
        if (d < best_d - 1e-12) {
          best_d = d;
          best_s = base + f * seg_len[i];
        }
      }
      base += seg_len[i];
    }
    const double s = project_onto_path(path, q);
    EXPECT_NEAR(distance(point_at_arc(path, s), q), best_d, 1e-6);
    const auto look = lookahead_point(path, {q.x, q.y, 0.0}, 0.4);
    const auto expect = point_at_arc(path, s + 0.4);
    EXPECT_NEAR(look.x, expect.x, 1e-12);
    EXPECT_NEAR(look.y, expect.y, 1e-12);
    (void)best_s;
  }
}

TEST(Follower, PointAtArcClamps)
{
  const auto path = polyline({{0, 0}, {1, 0}, {1, 2}});
  EXPECT_EQ(point_at_arc(path, -1.0).x, 0.0);
  EXPECT_EQ(point_at_arc(path, 9.0).y, 2.0);
  EXPECT_NEAR(point_at_arc(path, 1.5).y, 0.5, 1e-12);
}

TEST(Follower, AlignedRobotDrivesStraight)
{
  const auto path = polyline({{0, 0}, {1, 0}, {2, 0}});
  const FollowerParams fp;
  const auto r = follow(path, {0.1, 0.0, 0.0}, fp);
  EXPECT_FALSE(r.reached);
  EXPECT_GT(r.cmd.v, 0.0);
  EXPECT_LE(r.cmd.v, fp.v_max);
  EXPECT_NEAR(r.cmd.w, 0.0, 1e-12);
}

TEST(Follower, TurnsInPlaceWhenFacingAway)
{
  const auto path = polyline({{0, 0}, {1, 0}, {2, 0}});
  const auto r = follow(path, {0.1, 0.0, 3.0});
  EXPECT_EQ(r.cmd.v, 0.0);
  EXPECT_NE(r.cmd.w, 0.0);
  EXPECT_LE(std::abs(r.cmd.w), FollowerParams{}.w_max);
}

TEST(Follower, ReachedNeedsHeadingUnlessDisabled)
{
  auto path = polyline({{0, 0}, {1, 0}});
  path.poses.back().theta = 1.0;
  FollowerParams fp;
  EXPECT_TRUE(follow(path, {0.95, 0.0, 1.1}, fp).reached);
  EXPECT_FALSE(follow(path, {0.95, 0.0, 0.0}, fp).reached);
  fp.check_heading = false;
  EXPECT_TRUE(follow(path, {0.95, 0.0, 0.0}, fp).reached);
  EXPECT_FALSE(follow(path, {0.8, 0.0, 1.0}, fp).reached);
}

TEST(Follower, ReverseNeverDrivesForward)
{
  const auto path = polyline({{1, 0}, {0.5, 0}, {0, 0.2}});
  for (double th = -3.0; th <= 3.0; th += 0.25) {
    EXPECT_LE(follow(path, {1.0, 0.0, th}, {}, true).cmd.v, 0.0);
  }
  EXPECT_LT(follow(path, {1.0, 0.0, 0.0}, {}, true).cmd.v, 0.0);
}

RangeScan scan_with(double r)
{
  RangeScan s;
  s.max_range = 4.0;
  s.angles = {0.0, 1.0, 2.0};
  s.ranges = {4.0, r, 4.0};
  return s;
}

TEST(Recovery, CollisionThreshold)
{
  EXPECT_TRUE(check_collision(scan_with(0.15 + 0.09), 0.15));
  EXPECT_FALSE(check_collision(scan_with(0.15 + 0.11), 0.15));
  EXPECT_FALSE(check_collision(scan_with(4.0), 0.15));
}

TEST(Recovery, FullCycle)
{
  RecoveryState s;
  auto step = recovery_step(s, NavEvent::kCollision);
  EXPECT_EQ(step.state.phase, RecoveryPhase::kCollisionBacktrack);
  EXPECT_EQ(step.actions, std::vector<NavAction>{NavAction::kBacktrack});
  step = recovery_step(step.state, NavEvent::kBacktrackDone);
  EXPECT_EQ(step.actions, std::vector<NavAction>{NavAction::kClearCostmap});
  step = recovery_step(step.state, NavEvent::kCleared);
  EXPECT_EQ(step.state, (RecoveryState{RecoveryPhase::kReplanning, 1}));
  step = recovery_step(step.state, NavEvent::kPlanFail);
  EXPECT_EQ(step.state.attempt, 2);
  step = recovery_step(step.state, NavEvent::kPlanOk);
  EXPECT_EQ(step.state, RecoveryState{});
  EXPECT_EQ(step.actions, std::vector<NavAction>{NavAction::kFollow});
  step = recovery_step(step.state, NavEvent::kReached);
  EXPECT_EQ(step.state.phase, RecoveryPhase::kReached);
  EXPECT_THROW(recovery_step(step.state, NavEvent::kCollision), IllegalTransition);
}

TEST(Recovery, OffGraphPairsThrow)
{
  const std::vector<RecoveryState> states{
    {RecoveryPhase::kFollowing, 0}, {RecoveryPhase::kCollisionBacktrack, 0},
    {RecoveryPhase::kClearing, 0}, {RecoveryPhase::kReplanning, 1},
    {RecoveryPhase::kAborted, 0}, {RecoveryPhase::kReached, 0}};
  const std::vector<NavEvent> events{
    NavEvent::kCollision, NavEvent::kBacktrackDone, NavEvent::kCleared,
    NavEvent::kPlanOk, NavEvent::kPlanFail, NavEvent::kReached};
  int legal = 0;
  for (const auto & s : states) {
    for (const auto e : events) {
      try {
        recovery_step(s, e);
        ++legal;
      } catch (const IllegalTransition &) {
      }
    }
  }
  EXPECT_EQ(legal, 6);
}

TEST(Recovery, NamesRoundTrip)
{
  for (auto p : {RecoveryPhase::kFollowing, RecoveryPhase::kCollisionBacktrack, RecoveryPhase::kClearing,
      RecoveryPhase::kReplanning, RecoveryPhase::kAborted, RecoveryPhase::kReached})
  {
    EXPECT_EQ(recovery_phase_from_string(to_string(p)), p);
  }
  for (auto e : {NavEvent::kCollision, NavEvent::kBacktrackDone, NavEvent::kCleared,
      NavEvent::kPlanOk, NavEvent::kPlanFail, NavEvent::kReached})
  {
    EXPECT_EQ(nav_event_from_string(to_string(e)), e);
  }
}

TEST(TravelLog, WrapsAndKeepsNewest)
{
  TravelLog log(4);
  for (int i = 0; i < 10; ++i) {
    log.append(i, {i * 0.1, 0.0, 0.0});
  }
  EXPECT_EQ(log.size(), 4u);
  EXPECT_EQ(log.at(0).t, 6.0);
  EXPECT_EQ(log.back().t, 9.0);
  EXPECT_NEAR(log.total_arc(), 0.9, 1e-12);
}

TEST(TravelLog, MinSpacingSkipsNearbyPoses)
{
  TravelLog log;
  log.append(0.0, {0.0, 0.0, 0.0}, 0.05);
  log.append(0.1, {0.01, 0.0, 0.0}, 0.05);
  log.append(0.2, {0.06, 0.0, 0.0}, 0.05);
  EXPECT_EQ(log.size(), 2u);
}

TEST(TravelLog, BacktrackPathLength)
{
  TravelLog log;
  for (int i = 0; i <= 20; ++i) {
    log.append(i, {0.05 * i, 0.02 * (i % 3), 0.0});
  }
  const auto p = log.backtrack_path(0.3);
  EXPECT_NEAR(p.length(), 0.3, 1e-12);
  EXPECT_EQ(p.poses.front().x, log.back().pose.x);
  const auto whole = log.backtrack_path(100.0);
  EXPECT_NEAR(whole.length(), log.total_arc(), 1e-12);
  EXPECT_EQ(whole.poses.back().x, 0.0);
}

TEST(Backtracker, DoneOnProgressOrTimeout)
{
  TravelLog log;
  for (int i = 0; i <= 10; ++i) {
    log.append(i, {0.1 * i, 0.0, 0.0});
  }
  const Backtracker bt(log, 0.3, 0.05, 10.0, 5.0);
  EXPECT_NEAR(bt.target(), 0.3, 1e-12);
  EXPECT_FALSE(bt.done({1.0, 0.0, 0.0}, 10.0));
  EXPECT_FALSE(bt.done({0.8, 0.0, 0.0}, 10.0));
  EXPECT_TRUE(bt.done({0.72, 0.0, 0.0}, 10.0));
  EXPECT_TRUE(bt.done({1.0, 0.0, 0.0}, 15.0));
  const auto fp = bt.follower({});
  EXPECT_FALSE(fp.check_heading);
  EXPECT_LE(fp.goal_tolerance_xy, 0.0125);
}

}  // namespace
}  // namespace cbrn::nav
