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

#include "cbrn/radiation/samples.hpp"

#include <cmath>
#include <string>

#include <json.hpp>

#include "cbrn/common/errors.hpp"
#include "cbrn/common/json_util.hpp"

namespace cbrn::radiation
{

SyncResult synchronize(
  std::span<const TimedPose> poses, std::span<const TimedReading> readings, double max_skew)
{
  SyncResult out;
  out.pairing.assign(readings.size(), -1);
  std::size_t j = 0;
  for (std::size_t r = 0; r < readings.size(); ++r) {
    const double t = readings[r].t;
    while (j + 1 < poses.size() && poses[j + 1].t <= t) {
      ++j;
    }
    std::ptrdiff_t best = -1;
    double best_dt = 0.0;
    if (!poses.empty()) {
      best = static_cast<std::ptrdiff_t>(j);
      best_dt = std::abs(poses[j].t - t);
      if (j + 1 < poses.size()) {
        const double next_dt = std::abs(poses[j + 1].t - t);
        if (next_dt < best_dt) {
          best = static_cast<std::ptrdiff_t>(j + 1);
          best_dt = next_dt;
        }
      }
    }
    if (best < 0 || best_dt > max_skew) {
      ++out.dropped;
      continue;
    }
    out.pairing[r] = best;
    const auto & rd = readings[r].reading;
    out.set.samples.push_back(
      {poses[static_cast<std::size_t>(best)].pose, static_cast<double>(rd.counts) / rd.dwell});
  }
  return out;
}

void write_sample_log_line(std::ostream & out, const TimedReading & r)
{
  nlohmann::json j{
    {"t", r.t},
    {"x", r.reading.pose.x},
    {"y", r.reading.pose.y},
    {"counts", r.reading.counts},
    {"dwell", r.reading.dwell},
  };
  out << j.dump() << "\n";
}

std::vector<TimedReading> read_sample_log(std::istream & in)
{
  std::vector<TimedReading> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const std::string path = "/line" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error & e) {
      throw ConfigError(path, e.what());
    }
    TimedReading r;
    r.t = json_util::require_number(j, "t", path);
    r.reading.pose.x = json_util::require_number(j, "x", path);
    r.reading.pose.y = json_util::require_number(j, "y", path);
    const auto & counts = json_util::require(j, "counts", path);
    if (!counts.is_number_integer() || counts.get<std::int64_t>() < 0) {
      throw ConfigError(path + "/counts", "expected a non-negative integer");
    }
    r.reading.counts = counts.get<std::int64_t>();
    r.reading.dwell = json_util::require_number(j, "dwell", path);
    if (!(r.reading.dwell > 0.0)) {
      throw ConfigError(path + "/dwell", "must be > 0");
    }
    out.push_back(r);
  }
  return out;
}

GeigerSampleSet samples_from_log(std::span<const TimedReading> readings)
{
  GeigerSampleSet set;
  set.samples.reserve(readings.size());
  for (const auto & r : readings) {
    set.samples.push_back(
      {r.reading.pose, static_cast<double>(r.reading.counts) / r.reading.dwell});
  }
  return set;
}

}  // namespace cbrn::radiation
