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

#ifndef CBRN__RADIATION__SAMPLES_HPP_
#define CBRN__RADIATION__SAMPLES_HPP_

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "cbrn/common/geometry.hpp"
#include "cbrn/common/sensors.hpp"

namespace cbrn::radiation
{

struct TimedPose
{
  double t{0.0};
  Pose2D pose;
};

struct TimedReading
{
  double t{0.0};
  GeigerReading reading;
};

/// One training pair: where the robot was and the count rate it saw.
struct GeigerSample
{
  Pose2D pose;
  double rate{0.0};  // counts / dwell
};

struct GeigerSampleSet
{
  std::vector<GeigerSample> samples;

  std::size_t size() const {return samples.size();}
  bool empty() const {return samples.empty();}
};

struct SyncResult
{
  GeigerSampleSet set;
  std::size_t dropped{0};
  /// Pose index paired with each reading, -1 when dropped.
  std::vector<std::ptrdiff_t> pairing;
};

/// Pairs every reading with the nearest-in-time pose when |dt| <= max_skew;
/// equidistant poses resolve to the earlier one. Both streams must be
/// sorted by time.
SyncResult synchronize(
  std::span<const TimedPose> poses, std::span<const TimedReading> readings,
  double max_skew);

/// Sample log, one JSON object per line: {t, x, y, counts, dwell}.
void write_sample_log_line(std::ostream & out, const TimedReading & r);
std::vector<TimedReading> read_sample_log(std::istream & in);

/// Uses each record's own position as its pose (the log is already synchronized).
GeigerSampleSet samples_from_log(std::span<const TimedReading> readings);

}  // namespace cbrn::radiation

#endif  // CBRN__RADIATION__SAMPLES_HPP_
