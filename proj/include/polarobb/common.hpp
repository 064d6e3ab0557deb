/******************************************************************************
 * Copyright 2026 The polarobb Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#pragma once

#include <stdexcept>
#include <string>

namespace polarobb {

inline constexpr double kPi = 3.14159265358979323846;

/// Module-wide absolute tolerance for point-on-edge and collinearity tests,
/// in pixel units. Coordinates are O(1e3) px, so double precision leaves
/// ample headroom above this.
inline constexpr double kGeomEps = 1e-9;

/// Input is geometrically degenerate (collinear points, zero radius, ...).
struct DegenerateInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A denominator or scale fell below the numeric guard threshold.
struct NumericalGuard : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Grid or channel dimensions of two arguments do not agree.
struct DimMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An operation that averages over target centers received none.
struct EmptyMask : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A sweep specification is empty or inverted.
struct BadSweep : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A text input could not be parsed; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace polarobb
