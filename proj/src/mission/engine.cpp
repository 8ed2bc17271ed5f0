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

#include "cbrn/mission/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cbrn/common/errors.hpp"
#include "cbrn/common/json_util.hpp"
#include "cbrn/mapping/map_io.hpp"
#include "cbrn/mission/protocol.hpp"
#include "cbrn/nav/follower.hpp"
#include "cbrn/radiation/samples.hpp"

namespace cbrn::mission
{

using nlohmann::json;
using arbitration::GoalSource;
using nav::NavEvent;
using nav::RecoveryPhase;

namespace
{

// Tolerance for comparing accumulated sim times.
constexpr double kTimeEps = 1e-9;

json pose_json(const Pose2D & p)
{
  return json_util::pose_to_json(p);
}

json goal_json(const std::optional<arbitration::ActiveGoal> & g)
{
  if (!g) {
    return nullptr;
  }
  return {{"source", arbitration::to_string(g->source)}, {"pose", pose_json(g->pose)}};
}

json link_json(const arbitration::LinkState & link)
{
  return {
    {"connected", link.connected},
    {"armed", link.armed},
    {"last_heartbeat", finite_or_null(link.last_heartbeat)},
  };
}

json routine_json(const std::optional<manipulation::Routine> & r)
{
  if (!r) {
    return nullptr;
  }
  json steps = json::array();
  for (const auto & s : r->steps) {
    json path = json::array();
    for (const auto & p : s.tcp_path) {
      path.push_back({p.x, p.y});
    }
    steps.push_back(
      {{"name", s.name}, {"tcp_path", path}, {"height", s.height}, {"refinable", s.refinable},
        {"repeats", s.repeats}});
  }
  json j{
    {"name", manipulation::to_string(r->name)},
    {"status", manipulation::to_string(r->status)},
    {"cursor", r->cursor},
    {"repetition", r->repetition},
    {"steps", steps},
  };
  if (!r->fault_reason.empty()) {
    j["fault_reason"] = r->fault_reason;
  }
  if (r->name == manipulation::RoutineName::kValveTurn) {
    j["valve"] = {{"diameter", r->valve.diameter}, {"grip", manipulation::to_string(r->valve.grip)}};
  }
  return j;
}

std::uint8_t inscribed_guard_cost(const MissionConfig & cfg)
{
  // Goals must sit outside the collision band plus a margin.
  const double d = cfg.world.robot_radius + cfg.nav.collision_threshold + cfg.explore.goal_clearance;
  return nav::inflation_cost(d, cfg.nav.costmap);
}

}  // namespace

std::string to_string(EndReason r)
{
  switch (r) {
    case EndReason::kRunning: return "running";
    case EndReason::kCompleted: return "completed";
    case EndReason::kExhausted: return "exhausted";
    case EndReason::kStopped: return "stopped";
    case EndReason::kTimeLimit: return "time_limit";
    case EndReason::kReturnFailed: return "return_failed";
  }
  return "?";
}

json MissionSummary::to_json() const
{
  json probes_j = json::array();
  for (const auto & p : probes) {
    probes_j.push_back(
      {{"name", p.name}, {"x", p.position.x}, {"y", p.position.y}, {"mean", p.mean}, {"variance", p.variance}});
  }
  json peak = nullptr;
  if (peak_valid) {
    peak = {{"cell", peak_cell}, {"x", peak_position.x}, {"y", peak_position.y}, {"rate", peak_rate}};
  }
  const auto & t = tallies;
  return {
    {"end_reason", cbrn::mission::to_string(end_reason)},
    {"sim_time", sim_time},
    {"ticks", ticks},
    {"exhausted", exhausted},
    {"coverage", coverage},
    {"reachable_cells", reachable_cells},
    {"distance", distance},
    {"samples", samples},
    {"peak", peak},
    {"probes", probes_j},
    {"recovery", {
        {"collisions", t.collisions}, {"backtracks", t.backtracks}, {"replans", t.replans},
        {"plan_failures", t.plan_failures}, {"aborts", t.aborts}}},
    {"goals", {
        {"adopted", t.goals_adopted}, {"reached", t.goals_reached}, {"dropped", t.goals_dropped},
        {"preempts", t.preempts}, {"returns_fired", t.returns_fired}}},
    {"radiation_refits", t.refits},
    {"routine_faults", t.routine_faults},
    {"module_errors", t.module_errors},
  };
}

std::vector<std::uint8_t> reachable_cells(const world::WorldConfig & world, const nav::CostmapParams & params)
{
  mapping::TriStateGrid truth;
  truth.geometry = world.geometry;
  truth.cells.resize(world.occupied.size());
  for (std::size_t i = 0; i < truth.cells.size(); ++i) {
    truth.cells[i] = world.occupied[i] ? mapping::CellState::kOccupied : mapping::CellState::kFree;
  }
  const nav::Costmap cm = nav::build_costmap(truth, params);
  const auto cost = nav::cost_to_all(cm, world.start_pose);
  std::vector<std::uint8_t> out(cost.size(), 0);
  for (std::size_t i = 0; i < cost.size(); ++i) {
    out[i] = cost[i] != nav::kUnreachable ? 1 : 0;
  }
  return out;
}

struct MissionEngine::TickContext
{
  double now{0.0};
  bool new_scan{false};
  std::optional<radiation::TimedReading> reading;
  std::optional<Pose2D> user_goal;
  std::vector<OperatorEvent> routine_events;
  bool teleop_held{false};
  std::map<GoalSource, Pose2D> offers;
  std::optional<VelocityCmd> planner_cmd;
};

MissionEngine::MissionEngine(MissionConfig config, std::vector<OperatorEvent> script, std::ostream * log_stream)
: config_(std::move(config)),
  script_(std::move(script)),
  log_(log_stream),
  world_(config_.world),
  pose_(config_.world.start_pose),
  home_(config_.world.start_pose),
  occupancy_(config_.world.geometry, config_.mapping.clamp),
  body_(manipulation::default_body())
{
  config_.nav.costmap.robot_radius = config_.world.robot_radius;
  classified_ = mapping::classify(occupancy_, config_.mapping.p_free, config_.mapping.p_occ);
  rebuild_costmap();
  inventory_.tray_capacity = config_.manipulation.tray_capacity;
  inventory_.analyzer_capacity = config_.manipulation.analyzer_capacity;
  link_.timeout = config_.arbitration.heartbeat_timeout;
  travel_log_.append(0.0, pose_);
  pose_history_.push_back({0.0, pose_});
  log(
    {{"type", "header"}, {"schema", kLogSchema}, {"config", config_.to_json()},
      {"script", script_to_json(script_)}});
}

double MissionEngine::time() const
{
  return static_cast<double>(k_) * config_.tick_dt;
}

void MissionEngine::push_event(OperatorEvent e)
{
  std::lock_guard<std::mutex> lock(inbox_mutex_);
  inbox_.push_back(std::move(e));
}

void MissionEngine::set_publisher(std::function<void(std::shared_ptr<const std::string>)> publisher)
{
  publisher_ = std::move(publisher);
}

void MissionEngine::log(const json & record)
{
  if (log_ != nullptr) {
    *log_ << record.dump() << '\n';
  }
}

bool MissionEngine::tick()
{
  if (finished()) {
    return false;
  }
  TickContext ctx;
  ctx.now = time();
  drain_events(ctx);        // 1
  sense(ctx);               // 2
  update_occupancy(ctx);    // 3
  update_radiation(ctx);    // 4
  run_recovery(ctx);        // 5
  run_exploration(ctx);     // 6
  resolve_goals(ctx);       // 7
  plan_and_follow(ctx);     // 8
  resolve_velocity(ctx);    // 9
  step_world(ctx);          // 10
  advance_routine(ctx);     // 11
  finish_tick(ctx);         // 12
  return !finished();
}

void MissionEngine::run()
{
  while (tick()) {
  }
}

void MissionEngine::drain_events(TickContext & ctx)
{
  std::vector<OperatorEvent> events;
  while (script_pos_ < script_.size() && script_[script_pos_].t <= ctx.now + kTimeEps) {
    events.push_back(script_[script_pos_++]);
  }
  {
    std::lock_guard<std::mutex> lock(inbox_mutex_);
    for (auto & e : inbox_) {
      e.t = ctx.now;
      events.push_back(std::move(e));
    }
    inbox_.clear();
  }
  for (const auto & e : events) {
    log({{"type", "operator"}, {"t", ctx.now}, {"event", to_json(e)}});
    const json & p = e.payload;
    switch (e.type) {
      case EventType::kTeleop:
        if (p.value("release", false)) {
          teleop_cmd_.reset();
        } else {
          teleop_cmd_ = VelocityCmd{p.at("v").get<double>(), p.at("w").get<double>()};
          teleop_last_ = ctx.now;
        }
        break;
      case EventType::kSetGoal:
        ctx.user_goal = json_util::pose_from_json(p, "/payload");
        break;
      case EventType::kTriggerRoutine:
      case EventType::kRefine:
        ctx.routine_events.push_back(e);
        break;
      case EventType::kHeartbeat:
        arbitration::record_heartbeat(link_, ctx.now);
        break;
      case EventType::kPause:
        paused_ = p.value("paused", true);
        break;
      case EventType::kStop:
        stop_requested_ = true;
        break;
    }
  }
  if (teleop_cmd_ && ctx.now - teleop_last_ > config_.arbitration.teleop_hold + kTimeEps) {
    teleop_cmd_.reset();
  }
  ctx.teleop_held = teleop_cmd_.has_value();
}

void MissionEngine::sense(TickContext & ctx)
{
  const auto & s = config_.sensors;
  if (ctx.now + kTimeEps >= next_scan_) {
    scan_ = world_.raycast_scan(pose_, s.scan_beams, s.scan_range);
    have_scan_ = true;
    ctx.new_scan = true;
    next_scan_ += s.scan_period;
  }
  if (config_.radiation.enabled && ctx.now + kTimeEps >= next_geiger_) {
    next_geiger_ += s.geiger_period;
    try {
      ctx.reading = radiation::TimedReading{ctx.now, world_.sample_geiger(pose_, s.geiger_period)};
    } catch (const Error & e) {
      ++tallies_.module_errors;
      log({{"type", "error"}, {"t", ctx.now}, {"module", "world"}, {"what", e.what()}});
    }
  }
}

void MissionEngine::update_occupancy(TickContext & ctx)
{
  if (!ctx.new_scan) {
    return;
  }
  try {
    occupancy_.integrate(scan_, config_.mapping);
  } catch (const Error & e) {
    ++tallies_.module_errors;
    log({{"type", "error"}, {"t", ctx.now}, {"module", "geo-mapping"}, {"what", e.what()}});
    return;
  }
  classified_ = mapping::classify(occupancy_, config_.mapping.p_free, config_.mapping.p_occ);
  rebuild_costmap();
}

void MissionEngine::rebuild_costmap()
{
  costmap_ = nav::build_costmap(classified_, config_.nav.costmap);
}

void MissionEngine::update_radiation(TickContext & ctx)
{
  if (!config_.radiation.enabled || !ctx.reading) {
    return;
  }
  const std::vector<radiation::TimedReading> one{*ctx.reading};
  const auto sync = radiation::synchronize(pose_history_, one, config_.sensors.sync_skew);
  if (sync.set.empty()) {
    return;
  }
  samples_.samples.push_back(sync.set.samples.front());
  radiation::TimedReading logged = *ctx.reading;
  logged.reading.pose = sync.set.samples.front().pose;
  sample_log_.push_back(logged);
  ++since_refit_;
  if (since_refit_ >= config_.radiation.refit_samples ||
    ctx.now - last_refit_ + kTimeEps >= config_.radiation.refit_period)
  {
    refit(ctx.now);
  }
}

void MissionEngine::refit(double now)
{
  const auto & rc = config_.radiation;
  radiation::GpOptions opt;
  opt.sqrt_transform = rc.sqrt_transform;
  opt.max_samples = static_cast<std::size_t>(rc.max_samples);
  try {
    radiation::KernelParams kp = radiation::default_kernel_params(samples_, rc.lengthscale, opt);
    if (rc.signal_var > 0.0) {
      kp.signal_var = rc.signal_var;
    }
    if (rc.noise_var >= 0.0) {
      kp.noise_var = rc.noise_var;
    }
    gp_ = radiation::GpModel::fit(samples_, kp, opt);
    fitted_samples_ = samples_.size();
    render_stale_ = true;
    ++tallies_.refits;
    log({{"type", "radiation"}, {"t", now}, {"samples", samples_.size()}, {"refit", true}});
  } catch (const Error & e) {
    ++tallies_.module_errors;
    log({{"type", "error"}, {"t", now}, {"module", "rad-mapping"}, {"what", e.what()}});
  }
  since_refit_ = 0;
  last_refit_ = now;
}

void MissionEngine::nav_event(double now, NavEvent event)
{
  const auto step = nav::recovery_step(recovery_, event);
  recovery_ = step.state;
  json actions = json::array();
  for (auto a : step.actions) {
    actions.push_back(nav::to_string(a));
  }
  log(
    {{"type", "nav"}, {"t", now}, {"state", nav::to_string(recovery_.phase)}, {"event", nav::to_string(event)},
      {"attempt", recovery_.attempt}, {"actions", actions}, {"goal", goal_json(active_goal_)}});
}

void MissionEngine::run_recovery(TickContext & ctx)
{
  if (!active_goal_) {
    return;
  }
  const double now = ctx.now;
  switch (recovery_.phase) {
    case RecoveryPhase::kFollowing:
      if (ctx.new_scan &&
        nav::check_collision(scan_, config_.world.robot_radius, config_.nav.collision_threshold))
      {
        ++tallies_.collisions;
        ++tallies_.backtracks;
        ++recoveries_this_goal_;
        nav_event(now, NavEvent::kCollision);
        backtracker_ = nav::Backtracker(
          travel_log_, config_.nav.backtrack_distance, config_.world.geometry.resolution, now,
          config_.nav.backtrack_timeout);
      }
      break;
    case RecoveryPhase::kCollisionBacktrack:
      if (backtracker_.done(pose_, now)) {
        backtracker_.finish();
        nav_event(now, NavEvent::kBacktrackDone);
        if (recoveries_this_goal_ > config_.nav.max_recoveries_per_goal) {
          drop_goal(now, "recovery_limit", true);
          return;
        }
        // Clearing: rebuild the static layer from the current classified map.
        rebuild_costmap();
      }
      break;
    case RecoveryPhase::kClearing:
      nav_event(now, NavEvent::kCleared);
      break;
    case RecoveryPhase::kReplanning: {
      ++tallies_.replans;
      const bool ok = replan(now);
      if (!ok) {
        ++tallies_.plan_failures;
      }
      nav_event(now, ok ? NavEvent::kPlanOk : NavEvent::kPlanFail);
      if (recovery_.phase == RecoveryPhase::kAborted) {
        ++tallies_.aborts;
        drop_goal(now, "aborted", true);
      }
      break;
    }
    case RecoveryPhase::kAborted:
    case RecoveryPhase::kReached:
      break;
  }
}

bool MissionEngine::replan(double now)
{
  try {
    path_ = nav::plan(costmap_, pose_, active_goal_->pose, config_.nav.planner);
    log(
      {{"type", "plan"}, {"t", now}, {"cells", path_.cells.size()}, {"cost", path_.cost},
        {"goal", goal_json(active_goal_)}});
    return true;
  } catch (const Error & e) {
    path_ = {};
    log({{"type", "plan"}, {"t", now}, {"error", e.what()}, {"goal", goal_json(active_goal_)}});
    return false;
  }
}

void MissionEngine::run_exploration(TickContext & ctx)
{
  if (!config_.explore.enabled || active_goal_ || paused_ || !have_scan_ || finished()) {
    return;
  }
  if (ctx.teleop_held || ctx.now < mux_.cooldown_until || (link_.armed && !link_.connected)) {
    return;
  }
  if (exhausted_) {
    // The trip home was cancelled (e.g. by teleop): offer it again.
    if (config_.arbitration.return_home_when_done) {
      final_return_ = true;
      ctx.offers[GoalSource::kReturn] = home_;
    }
    return;
  }
  frontiers_ = explore::detect_frontiers(classified_, config_.explore.params.min_frontier_size);
  explore::ExplorationParams params = config_.explore.params;
  params.max_goal_cost = inscribed_guard_cost(config_);
  const auto sel = explore::select_goal(
    frontiers_, classified_, costmap_, pose_, params, &blacklist_, config_.nav.planner);
  blacklist_.next_cycle();
  if (sel.goal) {
    ctx.offers[GoalSource::kExploration] = *sel.goal;
    exploration_cell_ = sel.goal_cell;
    exploration_goals_.push_back(
      {ctx.now, sel.goal_cell, costmap_.cost[sel.goal_cell], classified_.cells[sel.goal_cell]});
    log(
      {{"type", "exploration"}, {"t", ctx.now}, {"frontiers", frontiers_.size()}, {"goal_cell", sel.goal_cell},
        {"score", sel.score}});
    return;
  }
  if (sel.deferred > 0) {
    return;
  }
  exhausted_ = true;
  log({{"type", "exploration"}, {"t", ctx.now}, {"frontiers", frontiers_.size()}, {"exhausted", true}});
  if (config_.arbitration.return_home_when_done) {
    final_return_ = true;
    ctx.offers[GoalSource::kReturn] = home_;
  } else {
    end(EndReason::kExhausted);
  }
}

void MissionEngine::resolve_goals(TickContext & ctx)
{
  const double now = ctx.now;
  if (auto ret = arbitration::watchdog_tick(link_, now, home_)) {
    ++tallies_.returns_fired;
    ctx.offers[GoalSource::kReturn] = ret->pose;
    log({{"type", "watchdog"}, {"t", now}, {"fired", true}, {"link", link_json(link_)}});
  }
  const auto effects = arbitration::manual_override(ctx.teleop_held, override_);
  if (effects.preempt) {
    ++tallies_.preempts;
    ctx.offers[GoalSource::kPreempt] = pose_;
  }
  if (ctx.user_goal) {
    ctx.offers[GoalSource::kUser] = *ctx.user_goal;
  }
  if (ctx.offers.empty()) {
    return;
  }
  const auto previous = active_goal_;
  const auto d = arbitration::goal_mux(ctx.offers, active_goal_);
  json offers = json::object();
  for (const auto & [src, pose] : ctx.offers) {
    offers[arbitration::to_string(src)] = pose_json(pose);
  }
  log(
    {{"type", "arbitration"}, {"t", now}, {"winner", d.winner ? arbitration::to_string(*d.winner) : ""},
      {"offers", offers}, {"cooldown_until", finite_or_null(mux_.cooldown_until)}, {"link", link_json(link_)},
      {"adopted", d.adopted}, {"cancelled", d.cancelled}});
  if (!d.adopted && ctx.offers.count(GoalSource::kExploration) && !d.cancelled) {
    exploration_cell_.reset();
  }
  if (d.adopted) {
    if (previous) {
      log({{"type", "goal"}, {"t", now}, {"action", "cancelled"}, {"goal", goal_json(previous)}});
    }
    adopt_goal(now, *d.active);
  } else if (d.cancelled) {
    active_goal_.reset();
    path_ = {};
    backtracker_.finish();
    log({{"type", "goal"}, {"t", now}, {"action", "cancelled"}, {"goal", goal_json(previous)}});
  }
}

void MissionEngine::adopt_goal(double now, const arbitration::ActiveGoal & goal)
{
  if (goal.source != GoalSource::kExploration) {
    exploration_cell_.reset();
  }
  if (goal.source != GoalSource::kReturn) {
    final_return_ = false;
  }
  active_goal_ = goal;
  goal_started_ = now;
  recoveries_this_goal_ = 0;
  recovery_ = {RecoveryPhase::kFollowing, 0};
  backtracker_.finish();
  ++tallies_.goals_adopted;
  log({{"type", "goal"}, {"t", now}, {"action", "adopted"}, {"goal", goal_json(active_goal_)}});
  if (!replan(now)) {
    drop_goal(now, "rejected", true);
  }
}

void MissionEngine::drop_goal(double now, const std::string & reason, bool blacklist)
{
  if (!active_goal_) {
    return;
  }
  ++tallies_.goals_dropped;
  log({{"type", "goal"}, {"t", now}, {"action", "dropped"}, {"reason", reason}, {"goal", goal_json(active_goal_)}});
  if (blacklist && active_goal_->source == GoalSource::kExploration && exploration_cell_) {
    const auto & ep = config_.explore.params;
    const int strikes = blacklist_.strike(config_.world.geometry, *exploration_cell_, ep.snap_radius);
    blacklist_.add(*exploration_cell_, strikes >= ep.max_strikes ? -1 : ep.blacklist_cycles);
  }
  if (final_return_ && active_goal_->source == GoalSource::kReturn) {
    end(EndReason::kReturnFailed);
  }
  active_goal_.reset();
  exploration_cell_.reset();
  path_ = {};
  backtracker_.finish();
}

void MissionEngine::goal_reached(double now)
{
  ++tallies_.goals_reached;
  log({{"type", "goal"}, {"t", now}, {"action", "reached"}, {"goal", goal_json(active_goal_)}});
  if (active_goal_->source == GoalSource::kExploration && exploration_cell_) {
    // Standing there did not clear the frontier: never pick it again.
    blacklist_.add(*exploration_cell_, -1);
  }
  const bool mission_done = final_return_ && active_goal_->source == GoalSource::kReturn;
  active_goal_.reset();
  exploration_cell_.reset();
  path_ = {};
  if (mission_done) {
    end(EndReason::kCompleted);
  }
}

bool MissionEngine::path_blocked() const
{
  if (path_.cells.size() < 2) {
    return false;
  }
  const double s = nav::project_onto_path(path_, pose_.position());
  double arc = 0.0;
  for (std::size_t i = 0; i < path_.cells.size(); ++i) {
    if (i > 0) {
      arc += distance(path_.poses[i - 1], path_.poses[i]);
    }
    if (i == 0 || arc + config_.world.geometry.resolution < s) {
      continue;
    }
    if (costmap_.blocked(path_.cells[i])) {
      return true;
    }
  }
  return false;
}

void MissionEngine::plan_and_follow(TickContext & ctx)
{
  if (!active_goal_ || paused_) {
    return;
  }
  const double now = ctx.now;
  if (now - goal_started_ > config_.nav.goal_timeout) {
    drop_goal(now, "timeout", true);
    return;
  }
  nav::FollowerParams fp = config_.nav.follower;
  fp.check_heading = active_goal_->source == GoalSource::kUser;
  switch (recovery_.phase) {
    case RecoveryPhase::kFollowing: {
      if (ctx.new_scan && path_blocked()) {
        if (!replan(now)) {
          drop_goal(now, "invalidated", true);
          return;
        }
      }
      const auto r = nav::follow(path_, pose_, fp, false);
      if (r.reached) {
        nav_event(now, NavEvent::kReached);
        ctx.planner_cmd = VelocityCmd{};
        goal_reached(now);
      } else {
        ctx.planner_cmd = r.cmd;
      }
      break;
    }
    case RecoveryPhase::kCollisionBacktrack:
      ctx.planner_cmd = nav::follow(backtracker_.path(), pose_, backtracker_.follower(fp), true).cmd;
      break;
    case RecoveryPhase::kClearing:
    case RecoveryPhase::kReplanning:
      ctx.planner_cmd = VelocityCmd{};
      break;
    case RecoveryPhase::kAborted:
    case RecoveryPhase::kReached:
      break;
  }
}

void MissionEngine::resolve_velocity(TickContext & ctx)
{
  const auto prev_source = last_velocity_.source;
  const auto prev_reason = last_velocity_.reason;
  std::optional<VelocityCmd> teleop;
  if (ctx.teleop_held) {
    teleop = teleop_cmd_;
  }
  auto d = arbitration::velocity_mux(teleop, ctx.planner_cmd, ctx.now, mux_, config_.arbitration.cooldown);
  if (d.source == arbitration::VelocitySource::kTeleop) {
    // Suppression runs from the last operator message, not the last held tick.
    d.state.cooldown_until = teleop_last_ + config_.arbitration.cooldown;
  }
  mux_ = d.state;
  last_velocity_ = d;
  if (d.source != prev_source || d.reason != prev_reason) {
    log(
      {{"type", "velocity"}, {"t", ctx.now}, {"source", arbitration::to_string(d.source)},
        {"reason", arbitration::to_string(d.reason)}, {"cooldown_until", finite_or_null(mux_.cooldown_until)}});
  }
}

void MissionEngine::step_world(TickContext & ctx)
{
  const double dt = config_.tick_dt;
  const Pose2D next = world_.step_robot(pose_, last_velocity_.cmd, dt, config_.nav.slip);
  distance_ += distance(pose_, next);
  pose_ = next;
  const double t = ctx.now + dt;
  travel_log_.append(t, pose_, 1e-4);
  pose_history_.push_back({t, pose_});
  if (pose_history_.size() > 64) {
    pose_history_.erase(pose_history_.begin(), pose_history_.begin() + 32);
  }
}

void MissionEngine::advance_routine(TickContext & ctx)
{
  using manipulation::RoutineEvent;
  using manipulation::RoutineEventType;
  using manipulation::RoutineStatus;
  const double now = ctx.now;
  auto apply = [&](const RoutineEvent & ev, const char * label) {
      try {
        routine_ = manipulation::advance(*routine_, ev, body_, inventory_);
      } catch (const IllegalEvent & e) {
        log({{"type", "routine"}, {"t", now}, {"rejected", label}, {"what", e.what()}});
        return;
      }
      if (routine_->status == RoutineStatus::kRunningStep) {
        step_end_ = now + config_.manipulation.step_duration;
      }
      if (routine_->status == RoutineStatus::kFault) {
        ++tallies_.routine_faults;
      }
      log(
        {{"type", "routine"}, {"t", now}, {"event", label}, {"status", manipulation::to_string(routine_->status)},
          {"cursor", routine_->cursor}, {"fault_reason", routine_->fault_reason}});
    };

  for (const auto & e : ctx.routine_events) {
    const json & p = e.payload;
    if (e.type == EventType::kRefine) {
      if (!routine_) {
        log({{"type", "routine"}, {"t", now}, {"rejected", "refine"}, {"what", "no routine"}});
        continue;
      }
      RoutineEvent ev{RoutineEventType::kRefine, {p.at("dx").get<double>(), p.at("dy").get<double>(),
          p.value("dtheta", 0.0)}, {}};
      apply(ev, "refine");
      continue;
    }
    if (p.value("reset", false)) {
      if (routine_) {
        apply({RoutineEventType::kReset, {}, {}}, "reset");
      }
      continue;
    }
    const bool idle = !routine_ || routine_->status == RoutineStatus::kIdle ||
      routine_->status == RoutineStatus::kDone || routine_->status == RoutineStatus::kFault;
    if (p.contains("name") && idle) {
      try {
        routine_ = manipulation::plan_routine(
          manipulation::routine_name_from_string(p.at("name").get<std::string>()), config_.manipulation.routine);
        log(
          {{"type", "routine"}, {"t", now}, {"event", "planned"}, {"name", manipulation::to_string(routine_->name)},
            {"status", manipulation::to_string(routine_->status)}});
      } catch (const Error & err) {
        log({{"type", "routine"}, {"t", now}, {"rejected", "plan"}, {"what", err.what()}});
      }
      continue;
    }
    if (!routine_) {
      log({{"type", "routine"}, {"t", now}, {"rejected", "operator_trigger"}, {"what", "no routine"}});
      continue;
    }
    apply({RoutineEventType::kOperatorTrigger, {}, {}}, "operator_trigger");
  }
  if (routine_ && routine_->status == RoutineStatus::kRunningStep && now + kTimeEps >= step_end_) {
    apply({RoutineEventType::kStepDone, {}, {}}, "step_done");
  }
}

void MissionEngine::finish_tick(TickContext & ctx)
{
  ++k_;
  const double t = time();
  const auto & v = last_velocity_;
  log(
    {{"type", "tick"}, {"k", k_}, {"t", t}, {"pose", {pose_.x, pose_.y, pose_.theta}}, {"cmd", {v.cmd.v, v.cmd.w}},
      {"source", arbitration::to_string(v.source)}, {"reason", arbitration::to_string(v.reason)},
      {"nav", nav::to_string(recovery_.phase)}, {"attempt", recovery_.attempt},
      {"goal", active_goal_ ? json(arbitration::to_string(active_goal_->source)) : json(nullptr)}});
  if (!finished()) {
    if (stop_requested_) {
      end(EndReason::kStopped);
    } else if (t + kTimeEps >= config_.max_time) {
      end(EndReason::kTimeLimit);
    }
  }
  if (publisher_ && (t + kTimeEps >= next_publish_ || finished())) {
    publish(t);
    next_publish_ = t + config_.publish_period;
  }
  (void)ctx;
}

void MissionEngine::end(EndReason reason)
{
  if (finished()) {
    return;
  }
  end_reason_ = reason;
  log({{"type", "end"}, {"t", time()}, {"reason", to_string(reason)}});
}

const radiation::RadiationMap & MissionEngine::radiation_map()
{
  if (!rendered_ || render_stale_) {
    if (gp_) {
      rendered_ = radiation::render_radiation_map(*gp_, config_.world.geometry);
    } else {
      const auto prior = radiation::GpModel::prior({config_.radiation.lengthscale, 1.0, 1.0});
      rendered_ = radiation::render_radiation_map(prior, config_.world.geometry);
    }
    render_stale_ = false;
  }
  return *rendered_;
}

const radiation::RadiationMap & MissionEngine::final_radiation_map()
{
  if (config_.radiation.enabled && !samples_.empty() && fitted_samples_ != samples_.size()) {
    refit(time());
  }
  return radiation_map();
}

MissionSummary MissionEngine::summary()
{
  MissionSummary s;
  s.end_reason = end_reason_;
  s.sim_time = time();
  s.ticks = k_;
  s.exhausted = exhausted_;
  s.distance = distance_;
  s.samples = samples_.size();
  s.tallies = tallies_;
  const auto reach = reachable_cells(config_.world, config_.nav.costmap);
  std::size_t seen = 0;
  for (std::size_t i = 0; i < reach.size(); ++i) {
    if (reach[i]) {
      ++s.reachable_cells;
      seen += classified_.cells[i] != mapping::CellState::kUnknown ? 1 : 0;
    }
  }
  s.coverage = s.reachable_cells > 0 ? static_cast<double>(seen) / static_cast<double>(s.reachable_cells) : 0.0;
  if (config_.radiation.enabled && gp_) {
    const auto & map = final_radiation_map();
    s.peak_valid = true;
    s.peak_cell = map.argmax_mean();
    s.peak_position = map.geometry.center(s.peak_cell);
    s.peak_rate = map.mean[s.peak_cell];
    for (const auto & probe : config_.probes) {
      const auto p = gp_->predict(probe.position);
      s.probes.push_back({probe.name, probe.position, p.mean, p.variance});
    }
    s.tallies = tallies_;
  }
  return s;
}

json MissionEngine::state_message()
{
  std::vector<std::uint8_t> occ(classified_.cells.size());
  for (std::size_t i = 0; i < occ.size(); ++i) {
    occ[i] = static_cast<std::uint8_t>(classified_.cells[i]);
  }
  json rad = nullptr;
  if (config_.radiation.enabled && gp_) {
    const auto & map = radiation_map();
    double mean_scale = 0.0;
    std::vector<double> display(map.mean.size());
    for (std::size_t i = 0; i < display.size(); ++i) {
      display[i] = map.display_mean(i);
      mean_scale = std::max(mean_scale, display[i]);
    }
    const double var_scale = map.prior_variance;
    rad = {
      {"mean", raster_to_json(map.geometry, radiation::quantize(display, mean_scale), {{"scale", mean_scale}})},
      {"variance", raster_to_json(map.geometry, radiation::quantize(map.variance, var_scale), {{"scale", var_scale}})},
    };
  }
  json frontiers = json::array();
  for (const auto & f : frontiers_) {
    frontiers.push_back({{"x", f.centroid.x}, {"y", f.centroid.y}, {"size", f.size}});
  }
  const auto & v = last_velocity_;
  return {
    {"type", "state"},
    {"version", kProtocolVersion},
    {"t", time()},
    {"pose", pose_json(pose_)},
    {"home", pose_json(home_)},
    {"occupancy", raster_to_json(classified_.geometry, occ, {{"values", "cell_state"}})},
    {"radiation", rad},
    {"frontiers", frontiers},
    {"goal", goal_json(active_goal_)},
    {"recovery_state", {{"state", nav::to_string(recovery_.phase)}, {"attempt", recovery_.attempt}}},
    {"routine", routine_json(routine_)},
    {"inventory", {
        {"tray", inventory_.tray}, {"analyzer", inventory_.analyzer},
        {"quarter_turns", inventory_.quarter_turns}, {"valve_turned", inventory_.valve_turned}}},
    {"link", link_json(link_)},
    {"velocity", {
        {"source", arbitration::to_string(v.source)}, {"reason", arbitration::to_string(v.reason)},
        {"v", v.cmd.v}, {"w", v.cmd.w}}},
    {"cooldown_until", finite_or_null(mux_.cooldown_until)},
    {"paused", paused_},
    {"exhausted", exhausted_},
    {"finished", finished()},
    {"end_reason", to_string(end_reason_)},
  };
}

void MissionEngine::publish(double now)
{
  (void)now;
  publisher_(std::make_shared<const std::string>(state_message().dump()));
}

void MissionEngine::write_outputs(const std::string & dir)
{
  std::filesystem::create_directories(dir);
  const std::string base = (std::filesystem::path(dir) / "").string();
  mapping::export_occupancy(base + "occupancy", occupancy_);
  const MissionSummary s = summary();
  if (config_.radiation.enabled && gp_) {
    const auto & map = final_radiation_map();
    radiation::export_radiation(base + "radiation", map);
    radiation::write_heatmap_ppm(base + "radiation_overlay.ppm", map, &occupancy_);
  }
  if (config_.radiation.enabled) {
    std::ofstream samples(base + "samples.jsonl");
    for (const auto & r : sample_log_) {
      radiation::write_sample_log_line(samples, r);
    }
  }
  std::ofstream out(base + "summary.json");
  if (!out) {
    throw Error("cannot write " + base + "summary.json");
  }
  out << s.to_json().dump(2) << '\n';
}

RunResult run_headless(const MissionConfig & config, const std::vector<OperatorEvent> & script, const std::string & out_dir)
{
  RunResult result;
  std::ofstream file;
  std::ostream * log = nullptr;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    result.log_path = (std::filesystem::path(out_dir) / "mission.jsonl").string();
    file.open(result.log_path);
    if (!file) {
      throw Error("cannot open " + result.log_path);
    }
    log = &file;
  }
  MissionEngine engine(config, script, log);
  engine.run();
  result.summary = engine.summary();
  if (log != nullptr) {
    *log << json{{"type", "summary"}, {"summary", result.summary.to_json()}}.dump() << '\n';
    file.close();
    engine.write_outputs(out_dir);
  }
  return result;
}

ReplayResult replay_log(const std::string & log_path)
{
  std::ifstream in(log_path);
  if (!in) {
    throw Error("cannot open " + log_path);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  if (lines.empty()) {
    throw Error("log is empty");
  }
  json header;
  try {
    header = json::parse(lines.front());
  } catch (const json::parse_error & e) {
    throw Error(std::string("log header is not JSON: ") + e.what());
  }
  if (header.value("type", "") != "header" || header.value("schema", "") != kLogSchema) {
    throw Error("not a mission log (missing or unsupported header)");
  }
  const MissionConfig config = mission_config_from_json(header.at("config"));
  const auto original_script = parse_event_script(header.at("script"));

  // Operator events as they were drained, so live sessions replay too. A
  // live event carries its drain time; a scripted one keeps its own.
  std::vector<OperatorEvent> script;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].find("\"type\":\"operator\"") == std::string::npos) {
      continue;
    }
    const json rec = json::parse(lines[i]);
    script.push_back(operator_event_from_json(rec.at("event"), "", true));
  }

  std::ostringstream out;
  MissionEngine engine(config, script, &out);
  // The regenerated header must carry the original script, not the drained one.
  std::ostringstream header_line;
  header_line << json{{"type", "header"}, {"schema", kLogSchema}, {"config", config.to_json()},
    {"script", script_to_json(original_script)}}.dump();
  engine.run();
  const MissionSummary summary = engine.summary();
  out << json{{"type", "summary"}, {"summary", summary.to_json()}}.dump() << '\n';

  std::vector<std::string> actual;
  std::istringstream regenerated(out.str());
  while (std::getline(regenerated, line)) {
    actual.push_back(line);
  }
  if (!actual.empty()) {
    actual.front() = header_line.str();
  }

  ReplayResult r;
  const std::size_t n = std::max(lines.size(), actual.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string & a = i < lines.size() ? lines[i] : std::string();
    const std::string & b = i < actual.size() ? actual[i] : std::string();
    if (a != b) {
      r.first_mismatch = i + 1;
      r.expected = a;
      r.actual = b;
      r.lines_compared = i;
      return r;
    }
  }
  r.identical = true;
  r.lines_compared = n;
  return r;
}

}  // namespace cbrn::mission
