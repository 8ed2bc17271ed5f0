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

#include "cbrn/mission/config.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>

#include "cbrn/common/errors.hpp"
#include "cbrn/common/json_util.hpp"
#include "cbrn/world/scenario_io.hpp"

namespace cbrn::mission
{

using nlohmann::json;
using namespace cbrn::json_util;

namespace
{

void check_keys(const json & obj, std::initializer_list<const char *> allowed, const std::string & path)
{
  if (!obj.is_object()) {
    throw ConfigError(path.empty() ? "/" : path, "expected an object");
  }
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto & [key, value] : obj.items()) {
    if (!ok.count(key)) {
      throw ConfigError(child(path, key), "unknown field");
    }
  }
}

const json * block(const json & root, const char * key, const std::string & path)
{
  if (!root.contains(key)) {
    return nullptr;
  }
  const json & b = root.at(key);
  if (!b.is_object()) {
    throw ConfigError(child(path, key), "expected an object");
  }
  return &b;
}

void positive(double v, const std::string & path)
{
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(path, "must be > 0");
  }
}

void non_negative(double v, const std::string & path)
{
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ConfigError(path, "must be >= 0");
  }
}

Point2 point_from_json(const json & v, const std::string & path)
{
  if (!v.is_object()) {
    throw ConfigError(path, "expected an object {x, y}");
  }
  return {require_number(v, "x", path), require_number(v, "y", path)};
}

json point_to_json(const Point2 & p)
{
  return {{"x", p.x}, {"y", p.y}};
}

void parse_sensors(const json & b, const std::string & p, SensorConfig & s)
{
  check_keys(b, {"scan_beams", "scan_range", "scan_period", "geiger_period", "sync_skew"}, p);
  read_int(b, "scan_beams", p, s.scan_beams);
  read_number(b, "scan_range", p, s.scan_range);
  read_number(b, "scan_period", p, s.scan_period);
  read_number(b, "geiger_period", p, s.geiger_period);
  read_number(b, "sync_skew", p, s.sync_skew);
  if (s.scan_beams < 1) {
    throw ConfigError(child(p, "scan_beams"), "must be >= 1");
  }
  positive(s.scan_range, child(p, "scan_range"));
  positive(s.scan_period, child(p, "scan_period"));
  positive(s.geiger_period, child(p, "geiger_period"));
  non_negative(s.sync_skew, child(p, "sync_skew"));
}

void parse_mapping(const json & b, const std::string & p, mapping::MappingParams & m)
{
  check_keys(b, {"l_occ", "l_free", "clamp", "p_free", "p_occ"}, p);
  read_number(b, "l_occ", p, m.l_occ);
  read_number(b, "l_free", p, m.l_free);
  read_number(b, "clamp", p, m.clamp);
  read_number(b, "p_free", p, m.p_free);
  read_number(b, "p_occ", p, m.p_occ);
  positive(m.l_occ, child(p, "l_occ"));
  if (!(m.l_free < 0.0)) {
    throw ConfigError(child(p, "l_free"), "must be < 0");
  }
  positive(m.clamp, child(p, "clamp"));
  if (!(m.p_free > 0.0 && m.p_free < m.p_occ && m.p_occ < 1.0)) {
    throw ConfigError(child(p, "p_occ"), "need 0 < p_free < p_occ < 1");
  }
}

void parse_radiation(const json & b, const std::string & p, RadiationConfig & r)
{
  check_keys(
    b, {"enabled", "lengthscale", "signal_var", "noise_var", "sqrt_transform", "refit_samples", "refit_period",
      "max_samples"}, p);
  read_bool(b, "enabled", p, r.enabled);
  read_number(b, "lengthscale", p, r.lengthscale);
  read_number(b, "signal_var", p, r.signal_var);
  read_number(b, "noise_var", p, r.noise_var);
  read_bool(b, "sqrt_transform", p, r.sqrt_transform);
  read_int(b, "refit_samples", p, r.refit_samples);
  read_number(b, "refit_period", p, r.refit_period);
  read_int(b, "max_samples", p, r.max_samples);
  positive(r.lengthscale, child(p, "lengthscale"));
  if (r.refit_samples < 1) {
    throw ConfigError(child(p, "refit_samples"), "must be >= 1");
  }
  positive(r.refit_period, child(p, "refit_period"));
  if (r.max_samples < 1) {
    throw ConfigError(child(p, "max_samples"), "must be >= 1");
  }
}

void parse_nav(const json & b, const std::string & p, NavConfig & n)
{
  check_keys(
    b, {"padding", "inflation_radius", "decay", "unknown_lethal", "unknown_cost", "cost_weight", "lookahead",
      "v_max", "w_max", "goal_tolerance_xy", "goal_tolerance_theta", "collision_threshold", "backtrack_distance",
      "backtrack_timeout", "slip", "max_recoveries_per_goal", "goal_timeout"}, p);
  read_number(b, "padding", p, n.costmap.padding);
  read_number(b, "inflation_radius", p, n.costmap.inflation_radius);
  read_number(b, "decay", p, n.costmap.decay);
  read_bool(b, "unknown_lethal", p, n.costmap.unknown_lethal);
  int unknown_cost = n.costmap.unknown_cost;
  read_int(b, "unknown_cost", p, unknown_cost);
  if (unknown_cost < 0 || unknown_cost > nav::kMaxInflatedCost) {
    throw ConfigError(child(p, "unknown_cost"), "must be in [0, 253]");
  }
  n.costmap.unknown_cost = static_cast<std::uint8_t>(unknown_cost);
  read_number(b, "cost_weight", p, n.planner.cost_weight);
  read_number(b, "lookahead", p, n.follower.lookahead);
  read_number(b, "v_max", p, n.follower.v_max);
  read_number(b, "w_max", p, n.follower.w_max);
  read_number(b, "goal_tolerance_xy", p, n.follower.goal_tolerance_xy);
  read_number(b, "goal_tolerance_theta", p, n.follower.goal_tolerance_theta);
  read_number(b, "collision_threshold", p, n.collision_threshold);
  read_number(b, "backtrack_distance", p, n.backtrack_distance);
  read_number(b, "backtrack_timeout", p, n.backtrack_timeout);
  read_number(b, "slip", p, n.slip);
  read_int(b, "max_recoveries_per_goal", p, n.max_recoveries_per_goal);
  read_number(b, "goal_timeout", p, n.goal_timeout);
  non_negative(n.costmap.padding, child(p, "padding"));
  if (!(n.costmap.inflation_radius >= n.costmap.padding)) {
    throw ConfigError(child(p, "inflation_radius"), "must be >= padding");
  }
  positive(n.costmap.decay, child(p, "decay"));
  non_negative(n.planner.cost_weight, child(p, "cost_weight"));
  positive(n.follower.lookahead, child(p, "lookahead"));
  positive(n.follower.v_max, child(p, "v_max"));
  positive(n.follower.w_max, child(p, "w_max"));
  positive(n.follower.goal_tolerance_xy, child(p, "goal_tolerance_xy"));
  positive(n.follower.goal_tolerance_theta, child(p, "goal_tolerance_theta"));
  non_negative(n.collision_threshold, child(p, "collision_threshold"));
  positive(n.backtrack_distance, child(p, "backtrack_distance"));
  positive(n.backtrack_timeout, child(p, "backtrack_timeout"));
  if (!(n.slip >= 0.0 && n.slip < 1.0)) {
    throw ConfigError(child(p, "slip"), "must be in [0, 1)");
  }
  if (n.max_recoveries_per_goal < 1) {
    throw ConfigError(child(p, "max_recoveries_per_goal"), "must be >= 1");
  }
  positive(n.goal_timeout, child(p, "goal_timeout"));
}

void parse_explore(const json & b, const std::string & p, ExploreConfig & e)
{
  check_keys(
    b, {"enabled", "min_frontier_size", "size_exponent", "snap_radius", "blacklist_cycles", "blacklist_radius",
      "max_strikes", "goal_clearance"}, p);
  read_bool(b, "enabled", p, e.enabled);
  int min_size = static_cast<int>(e.params.min_frontier_size);
  read_int(b, "min_frontier_size", p, min_size);
  if (min_size < 1) {
    throw ConfigError(child(p, "min_frontier_size"), "must be >= 1");
  }
  e.params.min_frontier_size = static_cast<std::size_t>(min_size);
  read_number(b, "size_exponent", p, e.params.size_exponent);
  read_number(b, "snap_radius", p, e.params.snap_radius);
  read_int(b, "blacklist_cycles", p, e.params.blacklist_cycles);
  read_number(b, "blacklist_radius", p, e.params.blacklist_radius);
  read_int(b, "max_strikes", p, e.params.max_strikes);
  if (e.params.max_strikes < 1) {
    throw ConfigError(child(p, "max_strikes"), "must be >= 1");
  }
  read_number(b, "goal_clearance", p, e.goal_clearance);
  non_negative(e.params.size_exponent, child(p, "size_exponent"));
  positive(e.params.snap_radius, child(p, "snap_radius"));
  if (e.params.blacklist_cycles < 1) {
    throw ConfigError(child(p, "blacklist_cycles"), "must be >= 1");
  }
  non_negative(e.params.blacklist_radius, child(p, "blacklist_radius"));
  non_negative(e.goal_clearance, child(p, "goal_clearance"));
}

void parse_arbitration(const json & b, const std::string & p, ArbitrationConfig & a)
{
  check_keys(b, {"cooldown", "heartbeat_timeout", "teleop_hold", "return_home_when_done"}, p);
  read_number(b, "cooldown", p, a.cooldown);
  read_number(b, "heartbeat_timeout", p, a.heartbeat_timeout);
  read_number(b, "teleop_hold", p, a.teleop_hold);
  read_bool(b, "return_home_when_done", p, a.return_home_when_done);
  non_negative(a.cooldown, child(p, "cooldown"));
  positive(a.heartbeat_timeout, child(p, "heartbeat_timeout"));
  positive(a.teleop_hold, child(p, "teleop_hold"));
}

void parse_manipulation(const json & b, const std::string & p, ManipulationConfig & m)
{
  check_keys(
    b, {"present_height", "swipe_stroke", "work_point", "valve_diameter", "valve_point", "quarter_turns",
      "tray_capacity", "analyzer_capacity", "step_duration"}, p);
  auto & r = m.routine;
  read_number(b, "present_height", p, r.present_height);
  read_number(b, "swipe_stroke", p, r.swipe_stroke);
  if (b.contains("work_point")) {
    r.work_point = point_from_json(b.at("work_point"), child(p, "work_point"));
  }
  read_number(b, "valve_diameter", p, r.valve_diameter);
  if (b.contains("valve_point")) {
    r.valve_point = point_from_json(b.at("valve_point"), child(p, "valve_point"));
  }
  read_int(b, "quarter_turns", p, r.quarter_turns);
  read_int(b, "tray_capacity", p, m.tray_capacity);
  read_int(b, "analyzer_capacity", p, m.analyzer_capacity);
  read_number(b, "step_duration", p, m.step_duration);
  positive(r.present_height, child(p, "present_height"));
  positive(r.swipe_stroke, child(p, "swipe_stroke"));
  positive(r.valve_diameter, child(p, "valve_diameter"));
  if (r.quarter_turns < 1) {
    throw ConfigError(child(p, "quarter_turns"), "must be >= 1");
  }
  if (m.tray_capacity < 0) {
    throw ConfigError(child(p, "tray_capacity"), "must be >= 0");
  }
  if (m.analyzer_capacity < 0) {
    throw ConfigError(child(p, "analyzer_capacity"), "must be >= 0");
  }
  positive(m.step_duration, child(p, "step_duration"));
}

}  // namespace

MissionConfig mission_config_from_json(const json & j, const std::string & base_dir)
{
  check_keys(
    j, {"schema", "world", "tick_dt", "max_time", "publish_period", "sensors", "mapping", "radiation", "nav",
      "explore", "arbitration", "manipulation", "probes", "log_path"}, "");
  MissionConfig cfg;
  if (j.contains("schema") && j.at("schema") != 1) {
    throw ConfigError("/schema", "unsupported schema version");
  }
  const json & w = require(j, "world", "");
  if (w.is_string()) {
    std::filesystem::path wp(w.get<std::string>());
    if (wp.is_relative()) {
      wp = std::filesystem::path(base_dir) / wp;
    }
    std::ifstream in(wp);
    if (!in) {
      throw ConfigError("/world", "cannot open scenario file " + wp.string());
    }
    json wj;
    try {
      wj = json::parse(in);
    } catch (const json::parse_error & e) {
      throw ConfigError("/world", std::string("scenario file is not valid JSON: ") + e.what());
    }
    cfg.world = world::world_config_from_json(wj, "/world");
  } else {
    cfg.world = world::world_config_from_json(w, "/world");
  }

  read_number(j, "tick_dt", "", cfg.tick_dt);
  read_number(j, "max_time", "", cfg.max_time);
  read_number(j, "publish_period", "", cfg.publish_period);
  positive(cfg.tick_dt, "/tick_dt");
  positive(cfg.max_time, "/max_time");
  positive(cfg.publish_period, "/publish_period");

  if (const json * b = block(j, "sensors", "")) {parse_sensors(*b, "/sensors", cfg.sensors);}
  if (const json * b = block(j, "mapping", "")) {parse_mapping(*b, "/mapping", cfg.mapping);}
  if (const json * b = block(j, "radiation", "")) {parse_radiation(*b, "/radiation", cfg.radiation);}
  if (const json * b = block(j, "nav", "")) {parse_nav(*b, "/nav", cfg.nav);}
  if (const json * b = block(j, "explore", "")) {parse_explore(*b, "/explore", cfg.explore);}
  if (const json * b = block(j, "arbitration", "")) {parse_arbitration(*b, "/arbitration", cfg.arbitration);}
  if (const json * b = block(j, "manipulation", "")) {parse_manipulation(*b, "/manipulation", cfg.manipulation);}
  cfg.nav.costmap.robot_radius = cfg.world.robot_radius;

  if (j.contains("probes")) {
    const json & probes = j.at("probes");
    if (!probes.is_array()) {
      throw ConfigError("/probes", "expected an array");
    }
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const std::string p = "/probes/" + std::to_string(i);
      const json & name = require(probes[i], "name", p);
      if (!name.is_string()) {
        throw ConfigError(p + "/name", "expected a string");
      }
      Probe probe{name.get<std::string>(), point_from_json(probes[i], p)};
      if (!cfg.world.geometry.contains(probe.position)) {
        throw ConfigError(p, "probe lies outside the grid");
      }
      cfg.probes.push_back(std::move(probe));
    }
  }
  if (j.contains("log_path")) {
    if (!j.at("log_path").is_string()) {
      throw ConfigError("/log_path", "expected a string");
    }
    cfg.log_path = j.at("log_path").get<std::string>();
  }
  return cfg;
}

MissionConfig load_mission_config(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("/", "cannot open config file " + path);
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error & e) {
    throw ConfigError("/", std::string("config is not valid JSON: ") + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();
  return mission_config_from_json(j, base.empty() ? "." : base.string());
}

json MissionConfig::to_json() const
{
  const auto & s = sensors;
  const auto & r = radiation;
  const auto & n = nav;
  const auto & e = explore;
  const auto & a = arbitration;
  const auto & m = manipulation;
  json probes_j = json::array();
  for (const auto & p : probes) {
    probes_j.push_back({{"name", p.name}, {"x", p.position.x}, {"y", p.position.y}});
  }
  json j{
    {"schema", 1},
    {"world", world::world_config_to_json(world)},
    {"tick_dt", tick_dt},
    {"max_time", max_time},
    {"publish_period", publish_period},
    {"sensors", {
        {"scan_beams", s.scan_beams}, {"scan_range", s.scan_range}, {"scan_period", s.scan_period},
        {"geiger_period", s.geiger_period}, {"sync_skew", s.sync_skew}}},
    {"mapping", {
        {"l_occ", mapping.l_occ}, {"l_free", mapping.l_free}, {"clamp", mapping.clamp},
        {"p_free", mapping.p_free}, {"p_occ", mapping.p_occ}}},
    {"radiation", {
        {"enabled", r.enabled}, {"lengthscale", r.lengthscale}, {"signal_var", r.signal_var},
        {"noise_var", r.noise_var}, {"sqrt_transform", r.sqrt_transform}, {"refit_samples", r.refit_samples},
        {"refit_period", r.refit_period}, {"max_samples", r.max_samples}}},
    {"nav", {
        {"padding", n.costmap.padding}, {"inflation_radius", n.costmap.inflation_radius},
        {"decay", n.costmap.decay}, {"unknown_lethal", n.costmap.unknown_lethal},
        {"unknown_cost", n.costmap.unknown_cost}, {"cost_weight", n.planner.cost_weight},
        {"lookahead", n.follower.lookahead}, {"v_max", n.follower.v_max}, {"w_max", n.follower.w_max},
        {"goal_tolerance_xy", n.follower.goal_tolerance_xy},
        {"goal_tolerance_theta", n.follower.goal_tolerance_theta},
        {"collision_threshold", n.collision_threshold}, {"backtrack_distance", n.backtrack_distance},
        {"backtrack_timeout", n.backtrack_timeout}, {"slip", n.slip},
        {"max_recoveries_per_goal", n.max_recoveries_per_goal}, {"goal_timeout", n.goal_timeout}}},
    {"explore", {
        {"enabled", e.enabled}, {"min_frontier_size", e.params.min_frontier_size},
        {"size_exponent", e.params.size_exponent}, {"snap_radius", e.params.snap_radius},
        {"blacklist_cycles", e.params.blacklist_cycles}, {"blacklist_radius", e.params.blacklist_radius},
        {"max_strikes", e.params.max_strikes},
        {"goal_clearance", e.goal_clearance}}},
    {"arbitration", {
        {"cooldown", a.cooldown}, {"heartbeat_timeout", a.heartbeat_timeout}, {"teleop_hold", a.teleop_hold},
        {"return_home_when_done", a.return_home_when_done}}},
    {"manipulation", {
        {"present_height", m.routine.present_height}, {"swipe_stroke", m.routine.swipe_stroke},
        {"work_point", point_to_json(m.routine.work_point)}, {"valve_diameter", m.routine.valve_diameter},
        {"valve_point", point_to_json(m.routine.valve_point)}, {"quarter_turns", m.routine.quarter_turns},
        {"tray_capacity", m.tray_capacity}, {"analyzer_capacity", m.analyzer_capacity},
        {"step_duration", m.step_duration}}},
    {"probes", probes_j},
  };
  if (!log_path.empty()) {
    j["log_path"] = log_path;
  }
  return j;
}

}  // namespace cbrn::mission
