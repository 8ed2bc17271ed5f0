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

#include "cbrn/mission/events.hpp"

#include <fstream>
#include <sstream>

#include "cbrn/common/errors.hpp"
#include "cbrn/common/json_util.hpp"

namespace cbrn::mission
{

using nlohmann::json;
using namespace cbrn::json_util;

namespace
{

EventType event_type_from_string(const std::string & s, const std::string & path)
{
  for (auto t : {EventType::kTeleop, EventType::kSetGoal, EventType::kTriggerRoutine, EventType::kRefine,
      EventType::kHeartbeat, EventType::kPause, EventType::kStop})
  {
    if (to_string(t) == s) {
      return t;
    }
  }
  throw ConfigError(path, "unknown event type '" + s + "'");
}

void validate_payload(EventType type, const json & p, const std::string & path)
{
  if (!p.is_object()) {
    throw ConfigError(path, "expected an object");
  }
  switch (type) {
    case EventType::kTeleop: {
      bool release = false;
      read_bool(p, "release", path, release);
      if (!release) {
        require_number(p, "v", path);
        require_number(p, "w", path);
      }
      break;
    }
    case EventType::kSetGoal:
      pose_from_json(p, path);
      break;
    case EventType::kTriggerRoutine: {
      if (p.contains("name") && !p.at("name").is_string()) {
        throw ConfigError(child(path, "name"), "expected a string");
      }
      bool reset = false;
      read_bool(p, "reset", path, reset);
      break;
    }
    case EventType::kRefine: {
      require_number(p, "dx", path);
      require_number(p, "dy", path);
      double dtheta = 0.0;
      read_number(p, "dtheta", path, dtheta);
      break;
    }
    case EventType::kPause: {
      bool paused = true;
      read_bool(p, "paused", path, paused);
      break;
    }
    case EventType::kHeartbeat:
    case EventType::kStop:
      break;
  }
}

}  // namespace

std::string to_string(EventType type)
{
  switch (type) {
    case EventType::kTeleop: return "teleop";
    case EventType::kSetGoal: return "set_goal";
    case EventType::kTriggerRoutine: return "trigger_routine";
    case EventType::kRefine: return "refine";
    case EventType::kHeartbeat: return "heartbeat";
    case EventType::kPause: return "pause";
    case EventType::kStop: return "stop";
  }
  return "?";
}

OperatorEvent operator_event_from_json(const json & j, const std::string & path, bool require_time)
{
  if (!j.is_object()) {
    throw ConfigError(path.empty() ? "/" : path, "expected an event object");
  }
  OperatorEvent e;
  const json & type = require(j, "type", path);
  if (!type.is_string()) {
    throw ConfigError(child(path, "type"), "expected a string");
  }
  e.type = event_type_from_string(type.get<std::string>(), child(path, "type"));
  if (require_time) {
    e.t = require_number(j, "t", path);
    if (!(e.t >= 0.0) || !std::isfinite(e.t)) {
      throw ConfigError(child(path, "t"), "must be >= 0");
    }
  }
  if (j.contains("payload")) {
    e.payload = j.at("payload");
  }
  validate_payload(e.type, e.payload, child(path, "payload"));
  return e;
}

json to_json(const OperatorEvent & e)
{
  return {{"t", e.t}, {"type", to_string(e.type)}, {"payload", e.payload}};
}

std::vector<OperatorEvent> parse_event_script(const json & j)
{
  if (!j.is_array()) {
    throw ConfigError("/", "event script must be an array");
  }
  std::vector<OperatorEvent> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = "/" + std::to_string(i);
    out.push_back(operator_event_from_json(j[i], p, true));
    if (out.size() > 1 && out.back().t < out[out.size() - 2].t) {
      throw ConfigError(p + "/t", "events must be sorted by time");
    }
  }
  return out;
}

std::vector<OperatorEvent> load_event_script(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("/", "cannot open event script " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first == std::string::npos) {
      return {};
    }
    if (text[first] == '[') {
      return parse_event_script(json::parse(text));
    }
    json arr = json::array();
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) {
        continue;
      }
      arr.push_back(json::parse(line));
    }
    return parse_event_script(arr);
  } catch (const json::parse_error & e) {
    throw ConfigError("/", std::string("event script is not valid JSON: ") + e.what());
  }
}

json script_to_json(const std::vector<OperatorEvent> & script)
{
  json arr = json::array();
  for (const auto & e : script) {
    arr.push_back(to_json(e));
  }
  return arr;
}

}  // namespace cbrn::mission
