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
#include <map>
#include <string>

#include "core/errors.hpp"

namespace bernopt::solver {

/// A finite nonlinear program:
///   minimize f(z)  s.t.  c_eq(z) = 0,  c_ineq(z) <= 0.
///
/// Multiplier convention: the Lagrangian is f + mult_eq' c_eq +
/// mult_ineq' c_ineq with mult_ineq >= 0; stationarity uses +J' mult for both
/// blocks. Everything downstream (covector mapping included) assumes this.
class NlpProblem {
public:
  virtual ~NlpProblem() = default;

  virtual int num_vars() const = 0;
  virtual int num_eq() const { return 0; }
  virtual int num_ineq() const { return 0; }

  virtual double objective(const Eigen::VectorXd& z) const = 0;
  virtual Eigen::VectorXd eq_constraints(const Eigen::VectorXd& z) const;
  virtual Eigen::VectorXd ineq_constraints(const Eigen::VectorXd& z) const;

  /// When true the three Jacobian members below are available; otherwise the
  /// solver falls back to finite differences.
  virtual bool has_derivatives() const { return false; }
  virtual Eigen::VectorXd objective_gradient(const Eigen::VectorXd& z) const;
  virtual Eigen::MatrixXd eq_jacobian(const Eigen::VectorXd& z) const;
  virtual Eigen::MatrixXd ineq_jacobian(const Eigen::VectorXd& z) const;

  virtual Eigen::VectorXd initial_guess() const;
};

enum class SolveStatus { converged, max_iter, infeasible, numerical_failure };
const char* to_string(SolveStatus status);

enum class FdScheme { central, forward };

struct SolverOptions {
  double stationarity_tol = 1e-6;
  double feasibility_tol = 1e-8;
  double complementarity_tol = 1e-6;
  int max_outer = 50;
  int max_inner = 500;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  /// An outer iteration must shrink the feasibility violation by this factor,
  /// otherwise the penalty grows.
  double feasibility_improvement = 0.25;
  double penalty_cap = 1e12;
  /// Proximal damping of the inner subproblems (method-of-multipliers
  /// stabilization): each inner phase minimizes the augmented Lagrangian plus
  /// prox_weight/2 * ||y - y_anchor||^2 in scaled coordinates. Keeps the
  /// iterates in the basin of the initial guess; the reported KKT residuals
  /// are unaffected. Decays per successful outer iteration.
  double prox_weight = 0.1;
  double prox_decay = 0.9;
  double prox_floor = 1e-3;
  FdScheme fd_scheme = FdScheme::central;
  /// Line-oriented iteration log: "iter objective feasibility stationarity".
  std::function<void(const std::string&)> log;
  bool log_inner = false;

  /// Flat key=value configuration (tolerances, caps, penalty schedule).
  /// Unknown keys raise ArgumentError.
  static SolverOptions from_keyvalues(const std::map<std::string, std::string>& kv);
  static SolverOptions from_keyvalues(const std::map<std::string, std::string>& kv,
                                      SolverOptions base);
};

struct NlpSolution {
  Eigen::VectorXd z;
  Eigen::VectorXd mult_eq;    // one per equality row, free sign
  Eigen::VectorXd mult_ineq;  // one per inequality row, >= 0
  double objective = 0.0;
  SolveStatus status = SolveStatus::numerical_failure;
  double stationarity_inf_norm = 0.0;
  double feasibility_inf_norm = 0.0;
  double complementarity_inf_norm = 0.0;
  int iterations = 0;  // inner iterations, all outer rounds
  int outer_iterations = 0;
};

/// Augmented-Lagrangian outer loop (multiplier updates, penalty growth on
/// stalled feasibility) around a BFGS line-search inner minimizer. Trial
/// points where an evaluation fails are treated as infeasible and stepped
/// back over, not fatal. Deterministic: same problem and options give the
/// same iterate sequence.
NlpSolution solve(const NlpProblem& problem, const SolverOptions& opts = {});

/// Finite-difference gradient with per-coordinate steps scaled to the
/// iterate. A non-finite probe raises EvaluationError naming the coordinate.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& fn,
                            const Eigen::VectorXd& z, FdScheme scheme = FdScheme::central);

struct KktResiduals {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double complementarity = 0.0;
};

/// Residual norms under the documented multiplier convention.
KktResiduals kkt_residual_norms(const NlpProblem& problem, const Eigen::VectorXd& z,
                                const Eigen::VectorXd& mult_eq,
                                const Eigen::VectorXd& mult_ineq);

/// The full stationarity residual vector grad f + Jeq' mult_eq +
/// Jineq' mult_ineq (used by the covector diagnostics).
Eigen::VectorXd stationarity_residual(const NlpProblem& problem, const Eigen::VectorXd& z,
                                      const Eigen::VectorXd& mult_eq,
                                      const Eigen::VectorXd& mult_ineq);

// Derivative access with finite-difference fallback.
Eigen::VectorXd eval_objective_gradient(const NlpProblem& problem, const Eigen::VectorXd& z,
                                        FdScheme scheme = FdScheme::central);
Eigen::MatrixXd eval_eq_jacobian(const NlpProblem& problem, const Eigen::VectorXd& z,
                                 FdScheme scheme = FdScheme::central);
Eigen::MatrixXd eval_ineq_jacobian(const NlpProblem& problem, const Eigen::VectorXd& z,
                                   FdScheme scheme = FdScheme::central);

}  // namespace bernopt::solver
