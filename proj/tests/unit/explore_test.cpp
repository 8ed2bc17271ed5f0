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
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "cbrn/explore/frontier.hpp"

namespace cbrn::explore
{
namespace
{

using mapping::CellState;
using mapping::TriStateGrid;

TriStateGrid from_rows(const std::vector<std::string> & rows, double res = 0.1)
{
  // Top row first; '.' free, '#' occupied, '?' unknown.
  TriStateGrid t;
  t.geometry.width = static_cast<int>(rows[0].size());
  t.geometry.height = static_cast<int>(rows.size());
  t.geometry.resolution = res;
  t.cells.resize(t.geometry.size());
  for (int r = 0; r < t.geometry.height; ++r) {
    for (int ix = 0; ix < t.geometry.width; ++ix) {
      const char ch = rows[r][ix];
      const int iy = t.geometry.height - 1 - r;
      t.cells[t.geometry.index(Cell{ix, iy})] =
        ch == '#' ? CellState::kOccupied : (ch == '?' ? CellState::kUnknown : CellState::kFree);
    }
  }
  return t;
}

nav::Costmap costmap_for(const TriStateGrid & t)
{
  nav::CostmapParams p;
  p.robot_radius = 0.0;
  p.padding = 0.0;
  p.inflation_radius = 0.0;
  return nav::build_costmap(t, p);
}

TEST(Frontier, CellRule)
{
  const auto t = from_rows({
    "????",
    "....",
    "....",
    "#...",
  });
  const auto & g = t.geometry;
  EXPECT_TRUE(is_frontier_cell(t, g.index(Cell{0, 2})));
  EXPECT_FALSE(is_frontier_cell(t, g.index(Cell{0, 1})));
  EXPECT_FALSE(is_frontier_cell(t, g.index(Cell{0, 3})));  // unknown itself
  EXPECT_FALSE(is_frontier_cell(t, g.index(Cell{0, 0})));  // occupied
}

TEST(Frontier, DiagonalUnknownCounts)
{
  const auto t = from_rows({
    "?..",
    "...",
    "...",
  });
  EXPECT_TRUE(is_frontier_cell(t, t.geometry.index(Cell{1, 1})));
  EXPECT_FALSE(is_frontier_cell(t, t.geometry.index(Cell{2, 0})));
}

TEST(Frontier, ComponentsAndMinSize)
{
  const auto t = from_rows({
    "??#???",
    "..#...",
    "..#...",
    "..#..?",
  });
  const auto all = detect_frontiers(t, 1);
  ASSERT_EQ(all.size(), 2u);
  // Right side: the row under the strip joins the cells around the lone
  // unknown corner; it holds the lowest index so it comes first.
  EXPECT_EQ(all[0].size, 6u);
  EXPECT_EQ(all[1].size, 2u);
  EXPECT_TRUE(std::is_sorted(all[0].cells.begin(), all[0].cells.end()));
  EXPECT_LT(all[0].cells.front(), all[1].cells.front());
  const auto big = detect_frontiers(t, 3);
  ASSERT_EQ(big.size(), 1u);
  EXPECT_EQ(big[0].size, 6u);
}

TEST(Frontier, CentroidIsMeanOfCells)
{
  const auto t = from_rows({
    "???",
    "...",
    "...",
  });
  const auto f = detect_frontiers(t, 1);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_NEAR(f[0].centroid.x, 0.15, 1e-12);
  EXPECT_NEAR(f[0].centroid.y, 0.15, 1e-12);
}

/// Flood-fill oracle: frontier components as sets of cells.
std::set<std::set<std::size_t>> oracle_components(const TriStateGrid & t, std::size_t min_size)
{
  const auto & g = t.geometry;
  auto frontier = [&](int ix, int iy) {
      if (t.at(Cell{ix, iy}) != CellState::kFree) {
        return false;
      }
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const Cell n{ix + dx, iy + dy};
          if ((dx || dy) && g.contains(n) && t.at(n) == CellState::kUnknown) {
            return true;
          }
        }
      }
      return false;
    };
  std::vector<int> label(g.size(), -1);
  std::set<std::set<std::size_t>> out;
  for (int iy = 0; iy < g.height; ++iy) {
    for (int ix = 0; ix < g.width; ++ix) {
      if (!frontier(ix, iy) || label[g.index(Cell{ix, iy})] >= 0) {
        continue;
      }
      std::set<std::size_t> comp;
      std::vector<Cell> stack{{ix, iy}};
      label[g.index(Cell{ix, iy})] = 1;
      while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        comp.insert(g.index(c));
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const Cell n{c.ix + dx, c.iy + dy};
            if (g.contains(n) && label[g.index(n)] < 0 && frontier(n.ix, n.iy)) {
              label[g.index(n)] = 1;
              stack.push_back(n);
            }
          }
        }
      }
      if (comp.size() >= min_size) {
        out.insert(comp);
      }
    }
  }
  return out;
}

TEST(Frontier, MatchesFloodFillOracle)
{
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    TriStateGrid t;
    t.geometry.width = 25;
    t.geometry.height = 18;
    t.geometry.resolution = 0.1;
    for (std::size_t i = 0; i < t.geometry.size(); ++i) {
      const double r = u(rng);
      t.cells.push_back(r < 0.15 ? CellState::kUnknown : (r < 0.25 ? CellState::kOccupied : CellState::kFree));
    }
    const std::size_t min_size = 1 + trial % 4;
    std::set<std::set<std::size_t>> got;
    for (const auto & f : detect_frontiers(t, min_size)) {
      EXPECT_EQ(f.size, f.cells.size());
      got.insert(std::set<std::size_t>(f.cells.begin(), f.cells.end()));
    }
    EXPECT_EQ(got, oracle_components(t, min_size)) << trial;
  }
}

TEST(SelectGoal, ScoreTradesDistanceForSize)
{
  // Small frontier close by on the left, a large one farther right.
  const auto t = from_rows({
    "?.......??????",
    "..............",
    "..............",
    "..............",
  });
  const auto cm = costmap_for(t);
  const Pose2D start{0.15, 0.05, 0.0};
  auto frontiers = detect_frontiers(t, 1);
  ASSERT_EQ(frontiers.size(), 2u);
  ExplorationParams p;
  p.snap_radius = 0.0;
  const auto sel = select_goal(frontiers, t, cm, start, p);
  ASSERT_FALSE(sel.exhausted());
  // Oracle: exact travel cost to each snapped cell over size^0.5.
  const auto reach = nav::cost_to_all(cm, start);
  double best = 1e18;
  std::size_t best_k = 99;
  for (std::size_t k = 0; k < frontiers.size(); ++k) {
    const auto cell = snap_goal_cell(frontiers[k], t, reach, cm, 0.0);
    ASSERT_TRUE(cell.has_value());
    const double s = reach[*cell] / 1e6 / std::sqrt(static_cast<double>(frontiers[k].size));
    EXPECT_NEAR(frontiers[k].travel_cost, reach[*cell] / 1e6, 1e-12);
    if (s < best) {
      best = s;
      best_k = k;
    }
  }
  EXPECT_EQ(sel.frontier, best_k);
  EXPECT_NEAR(sel.score, best, 1e-12);
  // Zero size exponent: nearest wins.
  p.size_exponent = 0.0;
  EXPECT_EQ(select_goal(frontiers, t, cm, start, p).frontier, 0u);
}

TEST(SelectGoal, SealedRoomIsExhausted)
{
  const auto t = from_rows({
    "??????",
    "######",
    "#....#",
    "######",
  });
  const auto cm = costmap_for(t);
  auto frontiers = detect_frontiers(t, 1);
  EXPECT_TRUE(frontiers.empty());
  EXPECT_TRUE(select_goal(frontiers, t, cm, {0.15, 0.15, 0.0}).exhausted());
}

TEST(SelectGoal, UnreachableFrontierIsSkipped)
{
  const auto t = from_rows({
    "...#..?",
    "...#...",
    "...#...",
  });
  const auto cm = costmap_for(t);
  auto frontiers = detect_frontiers(t, 1);
  ASSERT_EQ(frontiers.size(), 1u);
  ExplorationParams p;
  p.snap_radius = 0.05;
  const auto sel = select_goal(frontiers, t, cm, {0.05, 0.05, 0.0}, p);
  EXPECT_TRUE(sel.exhausted());
  EXPECT_TRUE(std::isinf(frontiers[0].travel_cost));
}

TEST(SelectGoal, BlacklistDefersAndExcludes)
{
  const auto t = from_rows({
    "????",
    "....",
    "....",
  });
  const auto cm = costmap_for(t);
  auto frontiers = detect_frontiers(t, 1);
  const Pose2D start{0.05, 0.05, 0.0};
  const auto first = select_goal(frontiers, t, cm, start);
  ASSERT_FALSE(first.exhausted());
  GoalBlacklist bl;
  bl.add(first.goal_cell, 1);
  const auto deferred = select_goal(frontiers, t, cm, start, {}, &bl);
  EXPECT_TRUE(deferred.exhausted());
  EXPECT_EQ(deferred.deferred, 1u);
  bl.next_cycle();
  EXPECT_FALSE(select_goal(frontiers, t, cm, start, {}, &bl).exhausted());
  bl.add(first.goal_cell, -1);
  const auto gone = select_goal(frontiers, t, cm, start, {}, &bl);
  EXPECT_TRUE(gone.exhausted());
  EXPECT_EQ(gone.deferred, 0u);
}

TEST(Blacklist, CyclesAndPermanence)
{
  GridGeometry g;
  g.width = 10;
  g.height = 10;
  g.resolution = 0.1;
  GoalBlacklist bl;
  bl.add(5, 2);
  bl.add(7, -1);
  bl.add(7, 5);  // permanent stays permanent
  EXPECT_EQ(bl.excludes(g, 5, 0.0), GoalBlacklist::Hit::kTimed);
  EXPECT_EQ(bl.excludes(g, 6, 0.1), GoalBlacklist::Hit::kPermanent);
  bl.next_cycle();
  EXPECT_TRUE(bl.contains(5));
  bl.next_cycle();
  EXPECT_FALSE(bl.contains(5));
  for (int i = 0; i < 10; ++i) {
    bl.next_cycle();
  }
  EXPECT_TRUE(bl.contains(7));
}

TEST(Blacklist, StrikesCountNearbyFailures)
{
  GridGeometry g;
  g.width = 10;
  g.height = 10;
  g.resolution = 0.1;
  GoalBlacklist bl;
  EXPECT_EQ(bl.strike(g, g.index(Cell{2, 2}), 0.3), 1);
  EXPECT_EQ(bl.strike(g, g.index(Cell{8, 8}), 0.3), 1);
  EXPECT_EQ(bl.strike(g, g.index(Cell{4, 2}), 0.3), 2);
  EXPECT_EQ(bl.strike(g, g.index(Cell{2, 2}), 0.3), 3);
  EXPECT_EQ(bl.strike(g, g.index(Cell{2, 2}), 0.0), 3);
}

}  // namespace
}  // namespace cbrn::explore
