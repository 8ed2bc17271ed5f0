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

#include "cbrn/manipulation/routine.hpp"

#include <algorithm>
#include <cmath>

#include "cbrn/common/errors.hpp"

namespace cbrn::manipulation
{

namespace
{

// Fixed stations on the front edge of the body, robot frame.
constexpr Point2 kStow{0.40, 0.0};
constexpr Point2 kStorage{0.33, 0.12};
constexpr Point2 kTray{0.33, -0.12};
constexpr Point2 kAnalyzer{0.33, -0.04};
constexpr double kTravelHeight = 0.30;

RoutineStep make_step(
  std::string name, std::vector<Point2> path, double height, bool refinable = false,
  StepEffect effect = StepEffect::kNone, int repeats = 1)
{
  return {std::move(name), std::move(path), height, refinable, repeats, effect};
}

double cross(const Point2 & o, const Point2 & a, const Point2 & b)
{
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const Point2 & a, const Point2 & b, const Point2 & p)
{
  constexpr double eps = 1e-12;
  if (std::abs(cross(a, b, p)) > eps * std::max(1.0, distance(a, b))) {
    return false;
  }
  return p.x >= std::min(a.x, b.x) - eps && p.x <= std::max(a.x, b.x) + eps &&
         p.y >= std::min(a.y, b.y) - eps && p.y <= std::max(a.y, b.y) + eps;
}

/// Does segment ab enter the open interior of poly?
bool segment_enters(const Polygon & poly, const Point2 & a, const Point2 & b)
{
  const double ex = b.x - a.x;
  const double ey = b.y - a.y;
  const double len2 = ex * ex + ey * ey;
  if (len2 == 0.0) {
    return point_in_polygon_interior(poly, a);
  }
  // Split ab wherever it meets the boundary; interior status is constant
  // on each piece, so testing the midpoints is exact.
  std::vector<double> ts{0.0, 1.0};
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 & p = poly[i];
    const Point2 & q = poly[(i + 1) % n];
    const double t_v = ((p.x - a.x) * ex + (p.y - a.y) * ey) / len2;
    if (t_v > 0.0 && t_v < 1.0) {
      ts.push_back(t_v);
    }
    const double dx = q.x - p.x;
    const double dy = q.y - p.y;
    const double den = ex * dy - ey * dx;
    if (den == 0.0) {
      continue;
    }
    const double t = ((p.x - a.x) * dy - (p.y - a.y) * dx) / den;
    const double u = ((p.x - a.x) * ey - (p.y - a.y) * ex) / den;
    if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) {
      ts.push_back(t);
    }
  }
  std::sort(ts.begin(), ts.end());
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    if (ts[k + 1] - ts[k] <= 0.0) {
      continue;
    }
    const double m = 0.5 * (ts[k] + ts[k + 1]);
    if (point_in_polygon_interior(poly, {a.x + m * ex, a.y + m * ey})) {
      return true;
    }
  }
  return point_in_polygon_interior(poly, a) || point_in_polygon_interior(poly, b);
}

[[noreturn]] void illegal(const Routine & r, const char * event)
{
  throw IllegalEvent(std::string("event ") + event + " not accepted in status " + to_string(r.status));
}

Routine fault(Routine r, std::string reason)
{
  r.status = RoutineStatus::kFault;
  r.fault_reason = std::move(reason);
  return r;
}

/// Gate before a step starts.
Routine start_step(Routine r, const Polygon & body, const Inventory & inv)
{
  const RoutineStep & step = r.steps[r.cursor];
  if (!check_self_contamination(step, body)) {
    return fault(std::move(r), "self_contamination");
  }
  if (step.effect == StepEffect::kDepositTray && inv.tray >= inv.tray_capacity) {
    return fault(std::move(r), "tray_full");
  }
  if (step.effect == StepEffect::kLoadAnalyzer && inv.analyzer >= inv.analyzer_capacity) {
    return fault(std::move(r), "analyzer_full");
  }
  r.status = RoutineStatus::kRunningStep;
  return r;
}

void apply_effect(const Routine & r, const RoutineStep & step, Inventory & inv)
{
  switch (step.effect) {
    case StepEffect::kNone:
      break;
    case StepEffect::kDepositTray:
      ++inv.tray;
      break;
    case StepEffect::kLoadAnalyzer:
      ++inv.analyzer;
      break;
    case StepEffect::kQuarterTurn:
      ++inv.quarter_turns;
      if (r.repetition + 1 == step.repeats) {
        inv.valve_turned = !inv.valve_turned;
      }
      break;
  }
}

}  // namespace

Grip select_grip(double diameter)
{
  if (!std::isfinite(diameter) || !(diameter > 0.0)) {
    throw InvalidParams("valve diameter must be positive");
  }
  return diameter <= kExternalGripMaxDiameter ? Grip::kExternal : Grip::kInternal;
}

ValveSpec make_valve(double diameter)
{
  return {diameter, select_grip(diameter)};
}

void RoutineParams::validate() const
{
  if (!(present_height > 0.0) || !std::isfinite(present_height)) {
    throw InvalidParams("present height must be positive");
  }
  if (!(swipe_stroke > 0.0) || !std::isfinite(swipe_stroke)) {
    throw InvalidParams("swipe stroke must be positive");
  }
  if (quarter_turns < 1) {
    throw InvalidParams("quarter turns must be >= 1");
  }
  select_grip(valve_diameter);
}

Polygon default_body()
{
  return {{-0.3, -0.2}, {0.3, -0.2}, {0.3, 0.2}, {-0.3, 0.2}};
}

Routine plan_routine(RoutineName name, const RoutineParams & params)
{
  params.validate();
  Routine r;
  r.name = name;
  r.status = RoutineStatus::kWaitingOperator;
  const Point2 w = params.work_point;
  const double half = 0.5 * params.swipe_stroke;
  const Point2 lift{kStow.x, kStorage.y - 0.02};

  switch (name) {
    case RoutineName::kSampleToTray:
    case RoutineName::kSampleToAnalyzer:
      r.steps.push_back(make_step("retrieve_probe", {kStow, kStorage, lift}, kTravelHeight));
      r.steps.push_back(make_step("present", {lift, w}, params.present_height, true));
      r.steps.push_back(
        make_step("swipe", {w, {w.x, w.y - half}, {w.x, w.y + half}}, params.present_height));
      if (name == RoutineName::kSampleToTray) {
        r.steps.push_back(make_step("move_to_tray", {{w.x, w.y + half}, {kStow.x, kTray.y}, kTray}, kTravelHeight));
        r.steps.push_back(make_step("deposit", {kTray, kStow}, kTravelHeight, false, StepEffect::kDepositTray));
      } else {
        r.steps.push_back(
          make_step("move_to_analyzer_slot", {{w.x, w.y + half}, {kStow.x, kAnalyzer.y}, kAnalyzer}, kTravelHeight));
        r.steps.push_back(make_step("analyze", {kAnalyzer, kStow}, kTravelHeight, false, StepEffect::kLoadAnalyzer));
      }
      break;
    case RoutineName::kValveTurn: {
      r.valve = make_valve(params.valve_diameter);
      const Point2 v = params.valve_point;
      const double reach = r.valve.grip == Grip::kExternal ? 0.5 * params.valve_diameter : 0.0;
      r.steps.push_back(make_step("approach", {kStow, {v.x - reach - 0.05, v.y}}, kTravelHeight, true));
      r.steps.push_back(make_step("grip", {{v.x - reach - 0.05, v.y}, {v.x - reach, v.y}}, kTravelHeight));
      r.steps.push_back(
        make_step("rotate", {{v.x - reach, v.y}}, kTravelHeight, false, StepEffect::kQuarterTurn, params.quarter_turns));
      break;
    }
  }
  return r;
}

bool point_in_polygon_interior(const Polygon & poly, const Point2 & p)
{
  const std::size_t n = poly.size();
  if (n < 3) {
    return false;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 & a = poly[i];
    const Point2 & b = poly[j];
    if (on_segment(a, b, p)) {
      return false;
    }
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) {
        inside = !inside;
      }
    }
  }
  return inside;
}

bool check_self_contamination(const RoutineStep & step, const Polygon & body)
{
  const auto & path = step.tcp_path;
  if (path.empty()) {
    return true;
  }
  if (path.size() == 1) {
    return !point_in_polygon_interior(body, path.front());
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (segment_enters(body, path[i], path[i + 1])) {
      return false;
    }
  }
  return true;
}

std::vector<Point2> refine_path(const std::vector<Point2> & path, const Pose2D & delta)
{
  if (path.empty()) {
    return path;
  }
  const Point2 pivot = path.front();
  const double c = std::cos(delta.theta);
  const double s = std::sin(delta.theta);
  std::vector<Point2> out;
  out.reserve(path.size());
  for (const Point2 & p : path) {
    const double rx = p.x - pivot.x;
    const double ry = p.y - pivot.y;
    out.push_back({pivot.x + c * rx - s * ry + delta.x, pivot.y + s * rx + c * ry + delta.y});
  }
  return out;
}

Routine advance(Routine r, const RoutineEvent & event, const Polygon & body, Inventory & inventory)
{
  using S = RoutineStatus;
  using E = RoutineEventType;
  if (event.type == E::kReset) {
    Routine idle;
    idle.name = r.name;
    return idle;
  }
  if (event.type == E::kFault) {
    if (r.status == S::kIdle || r.status == S::kDone || r.status == S::kFault) {
      illegal(r, "fault");
    }
    return fault(std::move(r), event.reason.empty() ? "external" : event.reason);
  }
  switch (r.status) {
    case S::kWaitingOperator:
    case S::kRefining:
      if (event.type == E::kOperatorTrigger) {
        return start_step(std::move(r), body, inventory);
      }
      if (event.type == E::kRefine && r.status == S::kRefining) {
        auto & next = r.steps[r.cursor];
        next.tcp_path = refine_path(next.tcp_path, event.delta);
        return r;
      }
      illegal(r, event.type == E::kRefine ? "refine" : "step_done");
    case S::kRunningStep:
      if (event.type == E::kStepDone) {
        const RoutineStep & step = r.steps[r.cursor];
        apply_effect(r, step, inventory);
        if (++r.repetition < step.repeats) {
          r.status = S::kWaitingOperator;
          return r;
        }
        r.repetition = 0;
        const bool refine_next = step.refinable;
        if (++r.cursor == r.steps.size()) {
          r.status = S::kDone;
        } else {
          r.status = refine_next ? S::kRefining : S::kWaitingOperator;
        }
        return r;
      }
      illegal(r, event.type == E::kRefine ? "refine" : "operator_trigger");
    case S::kIdle:
    case S::kDone:
    case S::kFault:
      break;
  }
  illegal(r, "any");
}

std::string to_string(RoutineName n)
{
  switch (n) {
    case RoutineName::kSampleToTray: return "SAMPLE_TO_TRAY";
    case RoutineName::kSampleToAnalyzer: return "SAMPLE_TO_ANALYZER";
    case RoutineName::kValveTurn: return "VALVE_TURN";
  }
  return "?";
}

std::string to_string(RoutineStatus s)
{
  switch (s) {
    case RoutineStatus::kIdle: return "IDLE";
    case RoutineStatus::kWaitingOperator: return "WAITING_OPERATOR";
    case RoutineStatus::kRunningStep: return "RUNNING_STEP";
    case RoutineStatus::kRefining: return "REFINING";
    case RoutineStatus::kDone: return "DONE";
    case RoutineStatus::kFault: return "FAULT";
  }
  return "?";
}

std::string to_string(Grip g)
{
  return g == Grip::kExternal ? "EXTERNAL" : "INTERNAL";
}

RoutineName routine_name_from_string(const std::string & s)
{
  for (auto n : {RoutineName::kSampleToTray, RoutineName::kSampleToAnalyzer, RoutineName::kValveTurn}) {
    if (to_string(n) == s) {
      return n;
    }
  }
  throw InvalidParams("unknown routine '" + s + "'");
}

}  // namespace cbrn::manipulation
