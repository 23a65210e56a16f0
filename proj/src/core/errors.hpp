// Copyright 2026 the bernopt authors
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

#include <stdexcept>
#include <string>

namespace bernopt {

/// Bad argument values (out-of-range index, inverted interval, ...).
class ArgumentError : public std::invalid_argument {
public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Shape mismatches between containers that must agree.
class DimensionError : public std::invalid_argument {
public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative routine exhausted its budget or lost precision.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// A user callback returned a non-finite value or failed outright.
/// The solver treats trial points that raise this as infeasible and backtracks.
class EvaluationError : public std::runtime_error {
public:
  explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bernopt
