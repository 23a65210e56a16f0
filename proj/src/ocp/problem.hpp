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

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "core/errors.hpp"

namespace bernopt::ocp {

struct FixedHorizon {
  double t0 = 0.0;
  double t1 = 1.0;
};

/// Final time becomes a decision scalar; the problem is transcribed on a unit
/// parameter interval with dynamics scaled by t_f.
struct FreeFinalTime {
  double t0 = 0.0;
  double tf_lower = 1.0;
  double tf_upper = 10.0;
};

using Horizon = std::variant<FixedHorizon, FreeFinalTime>;

using BoundaryScalarFn = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;
using StageScalarFn = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;
using BoundaryVecFn =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;
using StageVecFn =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;
using BoundaryJacFn =
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;
using StageJacFn =
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

/// Continuous-time problem data: minimize E(x(t0), x(tf)) + integral of
/// F(x, u), subject to dx/dt = f(x, u), boundary conditions e(x(t0), x(tf))
/// = 0 and path inequalities h(x, u) <= 0 (componentwise).
///
/// Callbacks must be pure, total and re-entrant; the solver may probe them at
/// arbitrary trial points. All gradient fields are optional: when every one a
/// problem needs is present the transcription assembles exact Jacobians,
/// otherwise the solver falls back to finite differences.
struct OcpProblem {
  std::string name;

  int n_x = 0;
  int n_u = 0;
  int n_e = 0;
  int n_h = 0;

  BoundaryScalarFn terminal_cost;  // E; empty means identically zero
  StageScalarFn running_cost;      // F; empty means identically zero
  StageVecFn dynamics;             // f; required
  BoundaryVecFn boundary;          // e; required when n_e > 0
  StageVecFn path;                 // h; required when n_h > 0

  Horizon horizon = FixedHorizon{};

  /// Adds tf_cost_weight * t_f to the objective (minimum-time problems).
  double tf_cost_weight = 0.0;

  // Optional analytic gradients.
  BoundaryVecFn terminal_grad_x0;  // dE/dx0, length n_x
  BoundaryVecFn terminal_grad_xf;  // dE/dxf
  StageVecFn running_grad_x;       // dF/dx
  StageVecFn running_grad_u;       // dF/du
  StageJacFn dynamics_jac_x;       // n_x x n_x
  StageJacFn dynamics_jac_u;       // n_x x n_u
  BoundaryJacFn boundary_jac_x0;   // n_e x n_x
  BoundaryJacFn boundary_jac_xf;   // n_e x n_x
  StageJacFn path_jac_x;           // n_h x n_x
  StageJacFn path_jac_u;           // n_h x n_u

  /// Optional boundary state hints used by the default straight-line guess.
  Eigen::VectorXd x0_hint;
  Eigen::VectorXd xf_hint;

  /// Optional custom initial guess: fills coefficient matrices (n_x x (N+1),
  /// n_u x (N+1)) and t_f (ignored for fixed horizons).
  std::function<void(int N, Eigen::MatrixXd& x_coeffs, Eigen::MatrixXd& u_coeffs,
                     double& tf)>
      initial_guess;

  /// True when some path row is independent of the control; costate estimates
  /// are then reported as uncertified (no jump conditions are modeled).
  bool pure_state_path = false;

  bool has_free_final_time() const {
    return std::holds_alternative<FreeFinalTime>(horizon);
  }
  double start_time() const;
  bool has_all_gradients() const;
};

/// Whole-interval separation from a fixed point: || proj(x(t)) - point || >=
/// clearance for all t.
struct MinSeparationFromPoint {
  std::string label;
  std::vector<int> state_indices;
  Eigen::VectorXd point;
  double clearance = 0.0;
};

enum class SeparationMode { temporal, spatial };

/// Separation between two state projections. `temporal` compares positions at
/// equal times; `spatial` over all parameter pairs.
struct MinSeparationPairwise {
  std::string label;
  std::vector<int> indices_a;
  std::vector<int> indices_b;
  double clearance = 0.0;
  SeparationMode mode = SeparationMode::temporal;
};

/// Norm band on a control projection: lower <= || u_sel(t) || <= upper for
/// all t. Enforced through the squared norm, which stays polynomial.
struct NormBand {
  std::string label;
  std::vector<int> control_indices;
  double lower = 0.0;
  double upper = 0.0;
};

using StructuredConstraint =
    std::variant<MinSeparationFromPoint, MinSeparationPairwise, NormBand>;

const std::string& constraint_label(const StructuredConstraint& c);
bool is_pure_state(const StructuredConstraint& c);

/// Identifies the reference data used by convergence benchmarks.
struct ReferenceSpec {
  enum class Kind { none, example1_file, example2_analytic, lq_analytic } kind =
      Kind::none;
  std::string path;  // for file-backed references
};

/// A problem plus the structured constraints and reference handle that travel
/// with it.
struct ProblemBundle {
  OcpProblem problem;
  std::vector<StructuredConstraint> constraints;
  ReferenceSpec reference;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Dimension and finiteness checks; probes each callback at the default
/// initial guess. Report-valued (does not throw on problem defects).
ValidationReport validate(const OcpProblem& problem);
ValidationReport validate(const ProblemBundle& bundle);

/// The default guess: straight line between the boundary hints (zeros when
/// absent) for states, zeros for controls, horizon midpoint for t_f.
void default_initial_guess(const OcpProblem& problem, int N, Eigen::MatrixXd& x_coeffs,
                           Eigen::MatrixXd& u_coeffs, double& tf);

}  // namespace bernopt::ocp
