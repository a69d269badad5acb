// Copyright 2026 The lgmpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace lgmpc {

/**
 * @brief Standard normal samples by Box-Muller over std::mt19937_64.
 *
 * The engine's output sequence is fixed by the C++ standard, unlike std::normal_distribution,
 * so a seed reproduces the same noise on every conforming library.
 */
class GaussianSource
{
public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double next()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r  = std::sqrt(-2.0 * std::log(u1));
    const double a  = 2.0 * std::numbers::pi * u2;
    spare_          = r * std::sin(a);
    has_spare_      = true;
    return r * std::cos(a);
  }

private:
  /// [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lgmpc
