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

#ifndef CBRN__MISSION__EVENTS_HPP_
#define CBRN__MISSION__EVENTS_HPP_

#include <string>
#include <vector>

#include <json.hpp>

namespace cbrn::mission
{

enum class EventType
{
  kTeleop,          // {v, w} or {release: true}
  kSetGoal,         // {x, y, theta}
  kTriggerRoutine,  // {name} starts a routine, {} triggers the next step, {reset: true}
  kRefine,          // {dx, dy, dtheta}
  kHeartbeat,       // {}
  kPause,           // {paused: bool}
  kStop,            // scripts only
};

/// Operator input with the sim time it takes effect.
struct OperatorEvent
{
  double t{0.0};
  EventType type{EventType::kHeartbeat};
  nlohmann::json payload = nlohmann::json::object();
};

std::string to_string(EventType type);

/// Validates type and payload. Script entries need "t"; live messages get
/// their time when they are drained.
OperatorEvent operator_event_from_json(const nlohmann::json & j, const std::string & path, bool require_time);
nlohmann::json to_json(const OperatorEvent & e);

/// Array of events with non-decreasing t.
std::vector<OperatorEvent> parse_event_script(const nlohmann::json & j);
/// JSON array file or one event object per line.
std::vector<OperatorEvent> load_event_script(const std::string & path);
nlohmann::json script_to_json(const std::vector<OperatorEvent> & script);

}  // namespace cbrn::mission

#endif  // CBRN__MISSION__EVENTS_HPP_
