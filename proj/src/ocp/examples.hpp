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

#include "ocp/problem.hpp"

namespace bernopt::ocp {

struct ExampleOptions {
  int fleet_size = 3;                                    // example 4 only, 2..11
  SeparationMode separation = SeparationMode::temporal;  // example 4 only
};

/// The four benchmark problems shipped with the library:
///   1. smooth scalar problem with known costate,
///   2. bang-bang control with a single switch,
///   3. single-vehicle minimum-time planning around three obstacles,
///   4. multi-vehicle Dubins fleet with pairwise separation.
/// Throws ArgumentError for an unknown id or fleet size outside 2..11.
ProblemBundle builtin_example(int id, const ExampleOptions& opts = {});

/// Parameters of the single-integrator minimum-time family (example 3 is an
/// instance).
struct SingleIntegratorParams {
  Eigen::VectorXd start;
  Eigen::VectorXd goal;
  std::vector<std::pair<Eigen::VectorXd, double>> obstacles;  // center, clearance
  double speed_min = 0.0;
  double speed_max = 1.0;
  double t0 = 0.0;
  double tf_lower = 1.0;
  double tf_upper = 10.0;
};
ProblemBundle make_single_integrator(const SingleIntegratorParams& params);

/// Parameters of the Dubins fleet family (example 4 is an instance).
struct DubinsFleetParams {
  struct Vehicle {
    Eigen::Vector3d start;  // x, y, heading
    Eigen::Vector2d goal;   // x, y
  };
  std::vector<Vehicle> vehicles;
  double speed_min = 15.0;
  double speed_max = 32.0;
  double max_turn_rate = 0.3;
  double separation = 50.0;
  SeparationMode separation_mode = SeparationMode::temporal;
  double t0 = 0.0;
  double tf_lower = 1.0;
  double tf_upper = 10.0;
};
ProblemBundle make_dubins_fleet(const DubinsFleetParams& params);

}  // namespace bernopt::ocp
