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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lgmpc {

/// Base for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Matrix expected to be skew-symmetric is not.
class NotSkew : public Error
{
public:
  using Error::Error;
};

/// Argument outside the domain of a function (e.g. det X <= 0 for the potential).
class DomainError : public Error
{
public:
  using Error::Error;
};

class StepSizeUnderflow : public Error
{
public:
  using Error::Error;
};

/// Reference trajectory violates the uniform bounds on R0 R0^T.
class AssumptionViolated : public Error
{
public:
  using Error::Error;
};

/// Gain pair fails the Hurwitz / Schur condition.
class GainError : public Error
{
public:
  using Error::Error;
};

/// A translated control box has an empty interval.
class InfeasibleBox : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

/// Wraps an error raised inside the closed loop with the sample index where it happened.
class SimulationError : public Error
{
public:
  SimulationError(std::size_t step, const std::string & what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step)
  {}

  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

}  // namespace lgmpc
