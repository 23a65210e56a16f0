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

#include <string>

#include "ocp/problem.hpp"

namespace bernopt::ocp {

/// Builds a problem from a JSON document describing an instance of one of the
/// built-in parametric families ("single_integrator" or "dubins_fleet").
/// The schema is documented in docs/formats.md; unknown keys are rejected
/// with an ArgumentError naming the offender.
ProblemBundle problem_from_json(const std::string& json_text);

/// Same, reading the document from a file.
ProblemBundle problem_from_json_file(const std::string& path);

}  // namespace bernopt::ocp
