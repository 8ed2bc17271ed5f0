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

#ifndef CBRN__MISSION__ENGINE_HPP_
#define CBRN__MISSION__ENGINE_HPP_

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbrn/arbitration/arbitration.hpp"
#include "cbrn/explore/frontier.hpp"
#include "cbrn/manipulation/routine.hpp"
#include "cbrn/mapping/occupancy_grid.hpp"
#include "cbrn/mission/config.hpp"
#include "cbrn/mission/events.hpp"
#include "cbrn/nav/costmap.hpp"
#include "cbrn/nav/planner.hpp"
#include "cbrn/nav/recovery.hpp"
#include "cbrn/radiation/gp.hpp"
#include "cbrn/radiation/radiation_map.hpp"
#include "cbrn/world/world.hpp"

namespace cbrn::mission
{

enum class EndReason
{
  kRunning,
  kCompleted,     // exploration exhausted and the robot is back home
  kExhausted,     // exploration exhausted, no return trip configured
  kStopped,       // scripted stop
  kTimeLimit,
  kReturnFailed,  // home unreachable after exploration
};

std::string to_string(EndReason r);

struct Tallies
{
  int collisions{0};
  int backtracks{0};
  int replans{0};
  int plan_failures{0};
  int aborts{0};
  int goals_adopted{0};
  int goals_reached{0};
  int goals_dropped{0};
  int preempts{0};
  int returns_fired{0};
  int refits{0};
  int routine_faults{0};
  int module_errors{0};
};

struct ProbeReading
{
  std::string name;
  Point2 position;
  double mean{0.0};
  double variance{0.0};
};

struct MissionSummary
{
  EndReason end_reason{EndReason::kRunning};
  double sim_time{0.0};
  long ticks{0};
  bool exhausted{false};
  /// Robot-reachable ground-truth cells that are no longer UNKNOWN.
  double coverage{0.0};
  std::size_t reachable_cells{0};
  double distance{0.0};
  std::size_t samples{0};
  bool peak_valid{false};
  std::size_t peak_cell{0};
  Point2 peak_position;
  double peak_rate{0.0};
  std::vector<ProbeReading> probes;
  Tallies tallies;

  nlohmann::json to_json() const;
};

/// Exploration goal as chosen, with the map state under it.
struct GoalRecord
{
  double t{0.0};
  std::size_t cell{0};
  std::uint8_t cost{0};
  mapping::CellState state{mapping::CellState::kUnknown};
};

/// Cells the robot center can reach from `start` in the true world under
/// the given costmap parameters.
std::vector<std::uint8_t> reachable_cells(const world::WorldConfig & world, const nav::CostmapParams & params);

/// Owns all mission state and advances it one tick at a time. Only
/// push_event and the published snapshots are safe to use from other
/// threads.
class MissionEngine
{
public:
  explicit MissionEngine(MissionConfig config, std::vector<OperatorEvent> script = {}, std::ostream * log = nullptr);

  /// Queues a live operator event; it takes effect at the next tick.
  void push_event(OperatorEvent e);
  /// Called with each serialized state message (at most every publish_period).
  void set_publisher(std::function<void(std::shared_ptr<const std::string>)> publisher);

  /// Advances one tick. Returns false once the mission has ended.
  bool tick();
  /// Ticks until the mission ends.
  void run();

  bool finished() const {return end_reason_ != EndReason::kRunning;}
  EndReason end_reason() const {return end_reason_;}
  double time() const;
  long ticks() const {return k_;}
  const MissionConfig & config() const {return config_;}
  const Pose2D & pose() const {return pose_;}
  const Pose2D & home() const {return home_;}
  const world::World & world() const {return world_;}
  const mapping::OccupancyGrid & occupancy() const {return occupancy_;}
  const mapping::TriStateGrid & classified() const {return classified_;}
  const nav::Costmap & costmap() const {return costmap_;}
  const nav::RecoveryState & recovery_state() const {return recovery_;}
  const std::optional<arbitration::ActiveGoal> & active_goal() const {return active_goal_;}
  const arbitration::MuxState & mux_state() const {return mux_;}
  const arbitration::LinkState & link() const {return link_;}
  const arbitration::VelocityDecision & last_velocity() const {return last_velocity_;}
  const std::optional<manipulation::Routine> & routine() const {return routine_;}
  const manipulation::Inventory & inventory() const {return inventory_;}
  const radiation::GeigerSampleSet & samples() const {return samples_;}
  const std::vector<explore::Frontier> & frontiers() const {return frontiers_;}
  const std::vector<GoalRecord> & exploration_goals() const {return exploration_goals_;}
  const Tallies & tallies() const {return tallies_;}
  bool exhausted() const {return exhausted_;}

  /// Radiation map from the latest fit, rendered on demand.
  const radiation::RadiationMap & radiation_map();
  /// Fits on every sample gathered so far, then renders.
  const radiation::RadiationMap & final_radiation_map();
  MissionSummary summary();
  /// The "state" message of the console protocol.
  nlohmann::json state_message();
  /// Writes occupancy, radiation and summary files into `dir`.
  void write_outputs(const std::string & dir);

private:
  struct TickContext;

  void log(const nlohmann::json & record);
  void drain_events(TickContext & ctx);
  void sense(TickContext & ctx);
  void update_occupancy(TickContext & ctx);
  void update_radiation(TickContext & ctx);
  void refit(double now);
  void run_recovery(TickContext & ctx);
  void run_exploration(TickContext & ctx);
  void resolve_goals(TickContext & ctx);
  void plan_and_follow(TickContext & ctx);
  void resolve_velocity(TickContext & ctx);
  void step_world(TickContext & ctx);
  void advance_routine(TickContext & ctx);
  void finish_tick(TickContext & ctx);

  void nav_event(double now, nav::NavEvent event);
  void adopt_goal(double now, const arbitration::ActiveGoal & goal);
  bool replan(double now);
  void drop_goal(double now, const std::string & reason, bool blacklist);
  void goal_reached(double now);
  void end(EndReason reason);
  bool path_blocked() const;
  void rebuild_costmap();
  void publish(double now);

  MissionConfig config_;
  std::vector<OperatorEvent> script_;
  std::size_t script_pos_{0};
  std::ostream * log_{nullptr};

  std::mutex inbox_mutex_;
  std::vector<OperatorEvent> inbox_;
  std::function<void(std::shared_ptr<const std::string>)> publisher_;
  double next_publish_{0.0};

  world::World world_;
  long k_{0};
  Pose2D pose_;
  Pose2D home_;
  double distance_{0.0};
  EndReason end_reason_{EndReason::kRunning};

  // sensing
  double next_scan_{0.0};
  double next_geiger_{0.0};
  RangeScan scan_;
  bool have_scan_{false};

  // mapping
  mapping::OccupancyGrid occupancy_;
  mapping::TriStateGrid classified_;
  nav::Costmap costmap_;

  // radiation
  std::vector<radiation::TimedPose> pose_history_;
  radiation::GeigerSampleSet samples_;
  std::vector<radiation::TimedReading> sample_log_;  // paired readings, for samples.jsonl
  std::optional<radiation::GpModel> gp_;
  std::size_t fitted_samples_{0};
  int since_refit_{0};
  double last_refit_{0.0};
  std::optional<radiation::RadiationMap> rendered_;
  bool render_stale_{true};

  // navigation
  nav::RecoveryState recovery_;
  nav::Path path_;
  nav::TravelLog travel_log_;
  nav::Backtracker backtracker_;
  int recoveries_this_goal_{0};
  double goal_started_{0.0};

  // exploration
  std::vector<explore::Frontier> frontiers_;
  explore::GoalBlacklist blacklist_;
  std::optional<std::size_t> exploration_cell_;
  std::vector<GoalRecord> exploration_goals_;
  bool exhausted_{false};
  bool final_return_{false};

  // arbitration
  std::optional<arbitration::ActiveGoal> active_goal_;
  arbitration::MuxState mux_;
  arbitration::LinkState link_;
  arbitration::OverrideState override_;
  arbitration::VelocityDecision last_velocity_;
  std::optional<VelocityCmd> teleop_cmd_;
  double teleop_last_{0.0};
  bool paused_{false};
  bool stop_requested_{false};

  // manipulation
  std::optional<manipulation::Routine> routine_;
  manipulation::Inventory inventory_;
  manipulation::Polygon body_;
  double step_end_{0.0};

  Tallies tallies_;
};

struct RunResult
{
  MissionSummary summary;
  std::string log_path;
};

/// Runs to mission end as fast as possible, writing the log and outputs
/// into `out_dir` when it is non-empty.
RunResult run_headless(const MissionConfig & config, const std::vector<OperatorEvent> & script, const std::string & out_dir);

struct ReplayResult
{
  bool identical{false};
  std::size_t lines_compared{0};
  std::size_t first_mismatch{0};  // 1-based line number, 0 when identical
  std::string expected;
  std::string actual;
};

/// Re-runs the mission recorded in a log (config from the header, operator
/// events from the operator records) and compares every line.
ReplayResult replay_log(const std::string & log_path);

}  // namespace cbrn::mission

#endif  // CBRN__MISSION__ENGINE_HPP_
