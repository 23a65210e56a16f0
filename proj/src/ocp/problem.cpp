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

#include "ocp/problem.hpp"

#include <cmath>
#include <sstream>

namespace bernopt::ocp {

double OcpProblem::start_time() const {
  if (const auto* fixed = std::get_if<FixedHorizon>(&horizon)) return fixed->t0;
  return std::get<FreeFinalTime>(horizon).t0;
}

bool OcpProblem::has_all_gradients() const {
  if (terminal_cost && (!terminal_grad_x0 || !terminal_grad_xf)) return false;
  if (running_cost && (!running_grad_x || !running_grad_u)) return false;
  if (!dynamics_jac_x || !dynamics_jac_u) return false;
  if (n_e > 0 && (!boundary_jac_x0 || !boundary_jac_xf)) return false;
  if (n_h > 0 && (!path_jac_x || !path_jac_u)) return false;
  return true;
}

const std::string& constraint_label(const StructuredConstraint& c) {
  return std::visit([](const auto& v) -> const std::string& { return v.label; }, c);
}

bool is_pure_state(const StructuredConstraint& c) {
  return !std::holds_alternative<NormBand>(c);
}

void default_initial_guess(const OcpProblem& problem, int N, Eigen::MatrixXd& x_coeffs,
                           Eigen::MatrixXd& u_coeffs, double& tf) {
  tf = 0.0;
  if (const auto* free = std::get_if<FreeFinalTime>(&problem.horizon)) {
    tf = 0.5 * (free->tf_lower + free->tf_upper);
  }
  if (problem.initial_guess) {
    x_coeffs.resize(problem.n_x, N + 1);
    u_coeffs.resize(problem.n_u, N + 1);
    problem.initial_guess(N, x_coeffs, u_coeffs, tf);
    return;
  }
  Eigen::VectorXd a = problem.x0_hint.size() == problem.n_x
                          ? problem.x0_hint
                          : Eigen::VectorXd::Zero(problem.n_x);
  Eigen::VectorXd b = problem.xf_hint.size() == problem.n_x ? problem.xf_hint : a;
  x_coeffs.resize(problem.n_x, N + 1);
  for (int j = 0; j <= N; ++j) {
    const double s = N == 0 ? 0.0 : static_cast<double>(j) / N;
    x_coeffs.col(j) = (1.0 - s) * a + s * b;
  }
  u_coeffs = Eigen::MatrixXd::Zero(problem.n_u, N + 1);
}

namespace {

void check_vector(const char* what, const Eigen::VectorXd& v, int expected,
                  std::vector<std::string>& out) {
  if (v.size() != expected) {
    std::ostringstream oss;
    oss << what << " dimension: got length " << v.size() << ", expected " << expected;
    out.push_back(oss.str());
  } else if (!v.allFinite()) {
    out.push_back(std::string("non-finite ") + what);
  }
}

}  // namespace

ValidationReport validate(const OcpProblem& problem) {
  ValidationReport report;
  auto& out = report.violations;

  if (problem.n_x < 1) out.push_back("state dimension must be positive");
  if (problem.n_u < 0) out.push_back("control dimension must be non-negative");
  if (problem.n_e < 0 || problem.n_h < 0) out.push_back("negative constraint dimension");
  if (!problem.dynamics) out.push_back("dynamics callback missing");
  if (problem.n_e > 0 && !problem.boundary) out.push_back("boundary callback missing");
  if (problem.n_h > 0 && !problem.path) out.push_back("path callback missing");

  if (const auto* fixed = std::get_if<FixedHorizon>(&problem.horizon)) {
    if (!(fixed->t1 > fixed->t0)) out.push_back("horizon: t1 must exceed t0");
  } else {
    const auto& free = std::get<FreeFinalTime>(problem.horizon);
    if (!(free.tf_lower > free.t0)) out.push_back("horizon: tf lower bound must exceed t0");
    if (!(free.tf_upper >= free.tf_lower)) out.push_back("horizon: empty t_f interval");
  }
  if (!out.empty()) return report;

  // Probe every callback at the initial guess.
  Eigen::MatrixXd xg, ug;
  double tf = 0.0;
  default_initial_guess(problem, 4, xg, ug, tf);
  const Eigen::VectorXd x0 = xg.col(0);
  const Eigen::VectorXd xf = xg.col(xg.cols() - 1);
  const Eigen::VectorXd u0 = problem.n_u > 0 ? Eigen::VectorXd(ug.col(0))
                                             : Eigen::VectorXd::Zero(0);
  try {
    check_vector("dynamics", problem.dynamics(x0, u0), problem.n_x, out);
    if (problem.boundary) {
      check_vector("boundary condition", problem.boundary(x0, xf), problem.n_e, out);
    }
    if (problem.path) {
      check_vector("path constraint", problem.path(x0, u0), problem.n_h, out);
    }
    if (problem.terminal_cost && !std::isfinite(problem.terminal_cost(x0, xf))) {
      out.push_back("non-finite terminal cost");
    }
    if (problem.running_cost && !std::isfinite(problem.running_cost(x0, u0))) {
      out.push_back("non-finite running cost");
    }
    if (problem.dynamics_jac_x) {
      const Eigen::MatrixXd jx = problem.dynamics_jac_x(x0, u0);
      if (jx.rows() != problem.n_x || jx.cols() != problem.n_x) {
        out.push_back("dynamics x-Jacobian shape");
      }
    }
    if (problem.dynamics_jac_u) {
      const Eigen::MatrixXd ju = problem.dynamics_jac_u(x0, u0);
      if (ju.rows() != problem.n_x || ju.cols() != problem.n_u) {
        out.push_back("dynamics u-Jacobian shape");
      }
    }
  } catch (const std::exception& e) {
    out.push_back(std::string("callback raised at the initial guess: ") + e.what());
  }
  return report;
}

ValidationReport validate(const ProblemBundle& bundle) {
  ValidationReport report = validate(bundle.problem);
  auto& out = report.violations;
  for (const auto& c : bundle.constraints) {
    if (const auto* sep = std::get_if<MinSeparationFromPoint>(&c)) {
      if (!(sep->clearance > 0)) out.push_back(sep->label + ": clearance must be positive");
      if (sep->point.size() != static_cast<int>(sep->state_indices.size())) {
        out.push_back(sep->label + ": point dimension mismatch");
      }
      for (int idx : sep->state_indices) {
        if (idx < 0 || idx >= bundle.problem.n_x) {
          out.push_back(sep->label + ": state index out of range");
        }
      }
    } else if (const auto* pw = std::get_if<MinSeparationPairwise>(&c)) {
      if (!(pw->clearance > 0)) out.push_back(pw->label + ": clearance must be positive");
      if (pw->indices_a.size() != pw->indices_b.size()) {
        out.push_back(pw->label + ": projection size mismatch");
      }
      for (int idx : pw->indices_a) {
        if (idx < 0 || idx >= bundle.problem.n_x) {
          out.push_back(pw->label + ": state index out of range");
        }
      }
      for (int idx : pw->indices_b) {
        if (idx < 0 || idx >= bundle.problem.n_x) {
          out.push_back(pw->label + ": state index out of range");
        }
      }
    } else if (const auto* band = std::get_if<NormBand>(&c)) {
      if (!(band->lower <= band->upper)) out.push_back(band->label + ": inverted band");
      for (int idx : band->control_indices) {
        if (idx < 0 || idx >= bundle.problem.n_u) {
          out.push_back(band->label + ": control index out of range");
        }
      }
    }
  }
  return report;
}

}  // namespace bernopt::ocp
