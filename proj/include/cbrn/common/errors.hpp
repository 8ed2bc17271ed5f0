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

#ifndef CBRN__COMMON__ERRORS_HPP_
#define CBRN__COMMON__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace cbrn
{

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A pose or point lies outside the grid it is queried against.
class OutOfBounds : public Error
{
public:
  using Error::Error;
};

class SingularKernel : public Error
{
public:
  using Error::Error;
};

class GoalLethal : public Error
{
public:
  using Error::Error;
};

class NoPath : public Error
{
public:
  using Error::Error;
};

class IllegalTransition : public Error
{
public:
  using Error::Error;
};

class IllegalEvent : public Error
{
public:
  using Error::Error;
};

class InvalidParams : public Error
{
public:
  using Error::Error;
};

/// Configuration failed schema validation. path() is a JSON pointer
/// such as "/world/resolution".
class ConfigError : public Error
{
public:
  ConfigError(std::string path, const std::string & what)
  : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string & path() const {return path_;}

private:
  std::string path_;
};

}  // namespace cbrn

#endif  // CBRN__COMMON__ERRORS_HPP_
