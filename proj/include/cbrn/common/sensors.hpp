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

#ifndef CBRN__COMMON__SENSORS_HPP_
#define CBRN__COMMON__SENSORS_HPP_

#include <cstdint>
#include <vector>

#include "cbrn/common/geometry.hpp"

namespace cbrn
{

/// Planar range scan. A range equal to max_range means "no return".
struct RangeScan
{
  Pose2D pose;
  std::vector<double> angles;  // robot frame
  std::vector<double> ranges;
  double max_range{0.0};
};

/// Counts integrated over `dwell` seconds at `pose`.
struct GeigerReading
{
  Pose2D pose;
  std::int64_t counts{0};
  double dwell{0.0};
};

}  // namespace cbrn

#endif  // CBRN__COMMON__SENSORS_HPP_
