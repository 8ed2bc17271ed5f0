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

#ifndef CBRN__COMMON__RNG_HPP_
#define CBRN__COMMON__RNG_HPP_

#include <cstdint>
#include <limits>

namespace cbrn
{

/// Consumers of the world PRNG. Each gets an independent stream, so
/// drawing more from one never shifts another.
enum class RngStream : std::uint64_t
{
  kMotion = 1,
  kGeiger = 2,
  kOdometry = 3,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t z)
{
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw n of stream s under seed k is a pure
/// function of (k, s, n). Satisfies UniformRandomBitGenerator.
class CounterRng
{
public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, RngStream stream)
  : key_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream) * 0x9E3779B97F4A7C15ULL)))
  {}

  static constexpr result_type min() {return 0;}
  static constexpr result_type max() {return std::numeric_limits<result_type>::max();}

  result_type operator()()
  {
    return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_);
  }

  /// Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() {return static_cast<double>((*this)() >> 11) * 0x1.0p-53;}

  std::uint64_t counter() const {return counter_;}

private:
  std::uint64_t key_;
  std::uint64_t counter_{0};
};

}  // namespace cbrn

#endif  // CBRN__COMMON__RNG_HPP_
