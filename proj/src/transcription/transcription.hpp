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

#include <memory>
#include <string>
#include <vector>

#include "core/bernstein.hpp"
#include "ocp/problem.hpp"
#include "solver/solver.hpp"

namespace bernopt::transcription {

enum class DeltaMode { exact, corollary, custom };

/// Relaxation bound for the discrete dynamics/path constraints:
/// `exact` -> 0, `corollary` -> C_P / N, `custom` -> the supplied value.
double delta_schedule(int N, DeltaMode mode, double c_p, double custom_value = 0.0);

struct TranscribeOptions {
  int order = 10;  // N
  DeltaMode delta_mode = DeltaMode::exact;
  double c_p = 1.0;
  double delta_custom = 0.0;
  /// Whole-interval certificates for structured constraints (in addition to
  /// the node rows, which are always added).
  bool certify = false;
  double geometry_tol = 1e-8;
  long geometry_budget = 100000;
};

/// Offsets of the coefficient blocks inside the flat decision vector z
/// (column-major within each block).
struct Layout {
  int n_x = 0;
  int n_u = 0;
  int order = 0;
  int x_offset = 0;
  int u_offset = 0;
  int tf_offset = -1;  // -1 for fixed horizons
  int num_vars = 0;
};

/// Index ranges of the constraint blocks; -1 marks an absent block. Counts
/// follow from the problem dimensions and order.
struct RowRanges {
  int eq_defect_begin = -1;      // n_x (N+1) rows when the relaxation is zero
  int eq_boundary_begin = -1;    // n_e rows
  int ineq_defect_upper_begin = -1;  // n_x (N+1) rows when relaxed
  int ineq_defect_lower_begin = -1;  // n_x (N+1) rows when relaxed
  int ineq_path_begin = -1;          // n_h (N+1) rows
  int ineq_tf_begin = -1;            // 2 rows for free final time
  int ineq_structured_begin = -1;    // node rows, then certified rows
};

/// The finite program built from an OcpProblem: decision vector
/// [vec(state coefficients), vec(control coefficients), t_f?], cost
/// E + w * sum_j F(nodes), dynamics defects at the nodes, boundary equalities
/// on the endpoint coefficients, and path rows at the nodes (relaxed by
/// delta_P when configured). Immutable after construction; evaluators are
/// pure in z.
class TranscribedNlp : public solver::NlpProblem {
public:
  int order() const { return layout_.order; }
  const Layout& layout() const { return layout_; }
  const RowRanges& rows() const { return rows_; }
  const Eigen::MatrixXd& node_matrix() const { return B_; }
  const Eigen::MatrixXd& derivative_node_matrix() const { return Bd_; }
  double weight() const { return w_; }
  double delta_p() const { return delta_p_; }
  const ocp::OcpProblem& problem() const { return *problem_; }
  const std::vector<ocp::StructuredConstraint>& structured() const { return structured_; }
  bool certify_mode() const { return certify_; }
  double geometry_tol() const { return geometry_tol_; }

  const std::vector<std::string>& eq_names() const { return eq_names_; }
  const std::vector<std::string>& ineq_names() const { return ineq_names_; }

  /// True when a path row or structured constraint does not involve the
  /// control; costate estimates are then uncertified.
  bool has_pure_state_rows() const;

  Eigen::VectorXd pack(const Eigen::MatrixXd& x_coeffs, const Eigen::MatrixXd& u_coeffs,
                       double tf = 0.0) const;
  void unpack(const Eigen::VectorXd& z, Eigen::MatrixXd& x_coeffs,
              Eigen::MatrixXd& u_coeffs, double& tf) const;

  /// Physical-time polynomials of a candidate point (for a free final time
  /// the domain is [t0, t0 + tf]).
  BernsteinPoly state_poly(const Eigen::VectorXd& z) const;
  BernsteinPoly control_poly(const Eigen::VectorXd& z) const;
  double final_time(const Eigen::VectorXd& z) const;
  std::vector<double> node_times(const Eigen::VectorXd& z) const;

  // solver::NlpProblem
  int num_vars() const override { return layout_.num_vars; }
  int num_eq() const override { return num_eq_; }
  int num_ineq() const override { return num_ineq_; }
  double objective(const Eigen::VectorXd& z) const override;
  Eigen::VectorXd eq_constraints(const Eigen::VectorXd& z) const override;
  Eigen::VectorXd ineq_constraints(const Eigen::VectorXd& z) const override;
  bool has_derivatives() const override { return analytic_; }
  Eigen::VectorXd objective_gradient(const Eigen::VectorXd& z) const override;
  Eigen::MatrixXd eq_jacobian(const Eigen::VectorXd& z) const override;
  Eigen::MatrixXd ineq_jacobian(const Eigen::VectorXd& z) const override;
  Eigen::VectorXd initial_guess() const override;

private:
  friend TranscribedNlp transcribe(const ocp::OcpProblem&, int, const TranscribeOptions&);
  friend TranscribedNlp attach_structured(const TranscribedNlp&,
                                          const std::vector<ocp::StructuredConstraint>&,
                                          bool);
  TranscribedNlp() = default;
  void rebuild_row_index();

  struct NodeEval;
  NodeEval evaluate_nodes(const Eigen::VectorXd& z) const;

  std::shared_ptr<const ocp::OcpProblem> problem_;
  Layout layout_;
  RowRanges rows_;
  Eigen::MatrixXd B_;   // (N+1) x (N+1), B(j,k) = b_{k,N}(s_j)
  Eigen::MatrixXd Bd_;  // (N+1) x N,     Bd(j,k) = b_{k,N-1}(s_j)
  double w_ = 0.0;      // quadrature weight, domain-scaled
  double delta_p_ = 0.0;
  double domain_width_ = 1.0;  // transcription domain: t1-t0 (fixed), 1 (free)
  double t_start_ = 0.0;
  bool free_tf_ = false;
  double tf_lower_ = 0.0;
  double tf_upper_ = 0.0;
  bool analytic_ = false;
  bool certify_ = false;
  double geometry_tol_ = 1e-8;
  long geometry_budget_ = 100000;
  std::vector<ocp::StructuredConstraint> structured_;
  int num_eq_ = 0;
  int num_ineq_ = 0;
  std::vector<std::string> eq_names_;
  std::vector<std::string> ineq_names_;
};

/// Builds Problem-P_N machinery for the given order. Structured constraints
/// are attached separately (attach_structured).
TranscribedNlp transcribe(const ocp::OcpProblem& problem, int N,
                          const TranscribeOptions& opts = {});

/// Returns a copy of `nlp` with the structured constraints appended: rows at
/// the nodes always, plus whole-interval certificates (geometry-backed lower
/// bounds) when `certify` is set.
TranscribedNlp attach_structured(const TranscribedNlp& nlp,
                                 const std::vector<ocp::StructuredConstraint>& constraints,
                                 bool certify);

/// transcribe + attach_structured for a bundle.
TranscribedNlp transcribe_bundle(const ocp::ProblemBundle& bundle,
                                 const TranscribeOptions& opts = {});

}  // namespace bernopt::transcription
