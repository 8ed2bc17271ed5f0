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

#ifndef CBRN__MANIPULATION__ROUTINE_HPP_
#define CBRN__MANIPULATION__ROUTINE_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "cbrn/common/geometry.hpp"

namespace cbrn::manipulation
{

inline constexpr double kExternalGripMaxDiameter = 0.160;
inline constexpr double kPresentHeight = 0.10;

enum class RoutineName
{
  kSampleToTray,
  kSampleToAnalyzer,
  kValveTurn,
};

enum class Grip
{
  kExternal,
  kInternal,
};

struct ValveSpec
{
  double diameter{0.0};
  Grip grip{Grip::kExternal};
};

/// External grip up to and including 0.160 m. Throws InvalidParams for a
/// diameter that is not finite and positive.
Grip select_grip(double diameter);
ValveSpec make_valve(double diameter);

/// What completing a step does to the robot's inventory or the valve.
enum class StepEffect
{
  kNone,
  kDepositTray,
  kLoadAnalyzer,
  kQuarterTurn,
};

struct RoutineStep
{
  std::string name;
  std::vector<Point2> tcp_path;  // robot frame, meters
  double height{0.0};            // above ground
  bool refinable{false};
  int repeats{1};
  StepEffect effect{StepEffect::kNone};
};

enum class RoutineStatus
{
  kIdle,
  kWaitingOperator,
  kRunningStep,
  kRefining,
  kDone,
  kFault,
};

struct RoutineParams
{
  double present_height{kPresentHeight};
  double swipe_stroke{0.15};
  /// Where the probe meets the ground, robot frame.
  Point2 work_point{0.55, 0.0};
  double valve_diameter{0.10};
  Point2 valve_point{0.60, 0.0};
  int quarter_turns{3};
  void validate() const;
};

struct Routine
{
  RoutineName name{RoutineName::kSampleToTray};
  std::vector<RoutineStep> steps;
  std::size_t cursor{0};
  int repetition{0};      // completed repeats of the current step
  RoutineStatus status{RoutineStatus::kIdle};
  std::string fault_reason;
  ValveSpec valve;        // VALVE_TURN only
};

struct Inventory
{
  int tray{0};
  int tray_capacity{2};
  int analyzer{0};
  int analyzer_capacity{1};
  int quarter_turns{0};
  bool valve_turned{false};
};

using Polygon = std::vector<Point2>;

/// Robot body outline in the robot frame.
Polygon default_body();

Routine plan_routine(RoutineName name, const RoutineParams & params = {});

/// True iff no point of `p` lies strictly inside the polygon.
bool point_in_polygon_interior(const Polygon & poly, const Point2 & p);
/// True iff no segment of the TCP path enters the polygon interior.
bool check_self_contamination(const RoutineStep & step, const Polygon & body);

enum class RoutineEventType
{
  kOperatorTrigger,
  kRefine,
  kStepDone,
  kFault,
  kReset,
};

struct RoutineEvent
{
  RoutineEventType type{RoutineEventType::kOperatorTrigger};
  Pose2D delta;        // refine: shift and rotation of the next step's path
  std::string reason;  // fault
};

/// Applies one operator or execution event. Throws IllegalEvent when the
/// event is not accepted in the current status.
Routine advance(Routine routine, const RoutineEvent & event, const Polygon & body, Inventory & inventory);

/// Moves the path by `delta`: rotation about its first point, then shift.
std::vector<Point2> refine_path(const std::vector<Point2> & path, const Pose2D & delta);

std::string to_string(RoutineName n);
std::string to_string(RoutineStatus s);
std::string to_string(Grip g);
RoutineName routine_name_from_string(const std::string & s);

}  // namespace cbrn::manipulation

#endif  // CBRN__MANIPULATION__ROUTINE_HPP_
