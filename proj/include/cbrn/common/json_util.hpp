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

#ifndef CBRN__COMMON__JSON_UTIL_HPP_
#define CBRN__COMMON__JSON_UTIL_HPP_

#include <cstdint>
#include <string>

#include <json.hpp>

#include "cbrn/common/errors.hpp"
#include "cbrn/common/geometry.hpp"

namespace cbrn::json_util
{

using nlohmann::json;

inline std::string child(const std::string & path, const std::string & key)
{
  return path + "/" + key;
}

inline const json & require(const json & obj, const std::string & key, const std::string & path)
{
  if (!obj.is_object()) {
    throw ConfigError(path, "expected an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError(child(path, key), "required field missing");
  }
  return *it;
}

inline double as_number(const json & v, const std::string & path)
{
  if (!v.is_number()) {
    throw ConfigError(path, "expected a number");
  }
  return v.get<double>();
}

inline double require_number(const json & obj, const std::string & key, const std::string & path)
{
  return as_number(require(obj, key, path), child(path, key));
}

/// Reads obj[key] into `out` when present; leaves `out` unchanged otherwise.
inline void read_number(
  const json & obj, const std::string & key, const std::string & path, double & out)
{
  if (obj.is_object() && obj.contains(key)) {
    out = as_number(obj.at(key), child(path, key));
  }
}

inline void read_int(const json & obj, const std::string & key, const std::string & path, int & out)
{
  if (obj.is_object() && obj.contains(key)) {
    const auto & v = obj.at(key);
    if (!v.is_number_integer()) {
      throw ConfigError(child(path, key), "expected an integer");
    }
    out = v.get<int>();
  }
}

inline void read_bool(const json & obj, const std::string & key, const std::string & path, bool & out)
{
  if (obj.is_object() && obj.contains(key)) {
    const auto & v = obj.at(key);
    if (!v.is_boolean()) {
      throw ConfigError(child(path, key), "expected a boolean");
    }
    out = v.get<bool>();
  }
}

inline Pose2D pose_from_json(const json & v, const std::string & path)
{
  if (!v.is_object()) {
    throw ConfigError(path, "expected an object {x, y, theta}");
  }
  Pose2D p;
  p.x = require_number(v, "x", path);
  p.y = require_number(v, "y", path);
  double theta = 0.0;
  read_number(v, "theta", path, theta);
  p.theta = normalize_angle(theta);
  return p;
}

inline json pose_to_json(const Pose2D & p)
{
  return json{{"x", p.x}, {"y", p.y}, {"theta", p.theta}};
}

}  // namespace cbrn::json_util

#endif  // CBRN__COMMON__JSON_UTIL_HPP_
