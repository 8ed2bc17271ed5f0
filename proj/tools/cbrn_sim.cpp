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

// Command-line front end: run a mission, replay a log, or build a
// radiation map from a sample log.

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbrn/common/errors.hpp"
#include "cbrn/mapping/map_io.hpp"
#include "cbrn/mission/config.hpp"
#include "cbrn/mission/engine.hpp"
#include "cbrn/mission/events.hpp"
#include "cbrn/radiation/gp.hpp"
#include "cbrn/radiation/radiation_map.hpp"
#include "cbrn/radiation/samples.hpp"
#include "cbrn/service/state_server.hpp"

namespace
{

using cbrn::mission::MissionEngine;

struct RunOptions
{
  std::string config;
  std::string script;
  bool headless{false};
  std::string serve;
  std::int64_t seed{-1};
  std::string out{"out"};
};

int cmd_run(const RunOptions & o)
{
  auto config = cbrn::mission::load_mission_config(o.config);
  if (o.seed >= 0) {
    config.world.seed = static_cast<std::uint64_t>(o.seed);
  }
  std::vector<cbrn::mission::OperatorEvent> script;
  if (!o.script.empty()) {
    script = cbrn::mission::load_event_script(o.script);
  }

  if (o.serve.empty()) {
    if (!o.headless) {
      std::cerr << "note: no --serve address, running headless\n";
    }
    const auto result = cbrn::mission::run_headless(config, script, o.out);
    std::cout << result.summary.to_json().dump(2) << "\n";
    return 0;
  }

  std::filesystem::create_directories(o.out);
  const std::string log_path = (std::filesystem::path(o.out) / "mission.jsonl").string();
  std::ofstream log(log_path);
  if (!log) {
    throw cbrn::Error("cannot open " + log_path);
  }
  MissionEngine engine(config, script, &log);
  const auto [host, port] = cbrn::service::parse_endpoint(o.serve);
  cbrn::service::StateServer server(host, port, [&engine](cbrn::mission::OperatorEvent e) {
      engine.push_event(std::move(e));
    });
  engine.set_publisher([&server](std::shared_ptr<const std::string> s) {server.publish(std::move(s));});
  server.start();
  std::cerr << "serving ws://" << host << ":" << server.port() << "\n" << std::flush;

  // Live runs pace sim time to wall time; --headless runs flat out.
  const auto t0 = std::chrono::steady_clock::now();
  while (engine.tick()) {
    if (!o.headless) {
      const auto due = t0 + std::chrono::duration<double>(engine.time());
      std::this_thread::sleep_until(due);
    }
  }
  const auto summary = engine.summary();
  log << nlohmann::json{{"type", "summary"}, {"summary", summary.to_json()}}.dump() << '\n';
  log.close();
  engine.write_outputs(o.out);
  std::cout << summary.to_json().dump(2) << "\n";
  // Give clients a moment to receive the final state.
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  server.stop();
  return 0;
}

int cmd_replay(const std::string & log_path)
{
  const auto r = cbrn::mission::replay_log(log_path);
  if (r.identical) {
    std::cout << "replay identical (" << r.lines_compared << " lines)\n";
    return 0;
  }
  std::cout << "replay diverged at line " << r.first_mismatch << "\n"
            << "  log:    " << r.expected.substr(0, 200) << "\n"
            << "  replay: " << r.actual.substr(0, 200) << "\n";
  return 1;
}

int cmd_radmap(
  const std::string & samples_path, const std::string & geometry_path, const std::string & out,
  double lengthscale, bool sqrt_transform)
{
  std::ifstream in(samples_path);
  if (!in) {
    throw cbrn::Error("cannot open " + samples_path);
  }
  const auto readings = cbrn::radiation::read_sample_log(in);
  const auto data = cbrn::radiation::samples_from_log(readings);
  const auto geometry = cbrn::mapping::load_geometry(geometry_path);
  cbrn::radiation::GpOptions opt;
  opt.sqrt_transform = sqrt_transform;
  const auto params = cbrn::radiation::default_kernel_params(data, lengthscale, opt);
  const auto model = data.empty() ?
    cbrn::radiation::GpModel::prior(params, 0.0, opt) : cbrn::radiation::GpModel::fit(data, params, opt);
  const auto map = cbrn::radiation::render_radiation_map(model, geometry);
  std::string stem = out;
  for (const char * ext : {".pgm", ".json", ".ppm"}) {
    if (stem.size() > std::strlen(ext) && stem.ends_with(ext)) {
      stem.resize(stem.size() - std::strlen(ext));
    }
  }
  const auto parent = std::filesystem::path(stem).parent_path();
  if (!parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  cbrn::radiation::export_radiation(stem, map);
  cbrn::radiation::write_heatmap_ppm(stem + ".ppm", map, nullptr);
  const auto peak = map.argmax_mean();
  const auto c = map.geometry.center(peak);
  std::cout << nlohmann::json{
    {"samples", data.size()}, {"lengthscale", params.lengthscale}, {"signal_var", params.signal_var},
    {"noise_var", params.noise_var}, {"peak", {{"cell", peak}, {"x", c.x}, {"y", c.y}, {"rate", map.mean[peak]}}},
    {"outputs", {stem + "_mean.pgm", stem + "_variance.pgm", stem + ".json", stem + ".ppm"}}}.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"CBRN reconnaissance mission simulator"};
  app.require_subcommand(1);

  RunOptions run;
  auto * run_cmd = app.add_subcommand("run", "Run a mission");
  run_cmd->add_option("--config", run.config, "Mission config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--script", run.script, "Operator event script")->check(CLI::ExistingFile);
  run_cmd->add_flag("--headless", run.headless, "Do not pace to wall-clock time");
  run_cmd->add_option("--serve", run.serve, "Serve the console protocol on addr:port");
  run_cmd->add_option("--seed", run.seed, "Override the world seed")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();

  std::string log_path;
  auto * replay_cmd = app.add_subcommand("replay", "Re-run a logged mission and compare");
  replay_cmd->add_option("--log", log_path, "Mission log (JSON lines)")->required()->check(CLI::ExistingFile);

  std::string samples;
  std::string geometry;
  std::string raster;
  double lengthscale = 0.3;
  bool sqrt_transform = false;
  auto * radmap_cmd = app.add_subcommand("radmap", "Build a radiation map from logged samples");
  radmap_cmd->add_option("--samples", samples, "Sample log (JSON lines: t, x, y, counts, dwell)")
  ->required()->check(CLI::ExistingFile);
  radmap_cmd->add_option("--geometry", geometry, "Map sidecar or scenario file")->required()->check(CLI::ExistingFile);
  radmap_cmd->add_option("--out", raster, "Output raster stem")->required();
  radmap_cmd->add_option("--lengthscale", lengthscale, "RBF lengthscale (m)")->capture_default_str();
  radmap_cmd->add_flag("--sqrt", sqrt_transform, "Regress on sqrt(rate)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      return cmd_run(run);
    }
    if (*replay_cmd) {
      return cmd_replay(log_path);
    }
    if (*radmap_cmd) {
      return cmd_radmap(samples, geometry, raster, lengthscale, sqrt_transform);
    }
  } catch (const cbrn::ConfigError & e) {
    std::cerr << "config error at " << e.path() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
