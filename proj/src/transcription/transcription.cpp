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

#include "transcription/transcription.hpp"

#include <cmath>
#include <sstream>

#include "core/geometry.hpp"

namespace bernopt::transcription {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double delta_schedule(int N, DeltaMode mode, double c_p, double custom_value) {
  if (N < 1) throw ArgumentError("delta_schedule: order must be >= 1");
  switch (mode) {
    case DeltaMode::exact:
      return 0.0;
    case DeltaMode::corollary:
      if (c_p < 0) throw ArgumentError("delta_schedule: C_P must be non-negative");
      return c_p / N;
    case DeltaMode::custom:
      if (custom_value < 0) throw ArgumentError("delta_schedule: negative custom bound");
      return custom_value;
  }
  throw ArgumentError("delta_schedule: bad mode");
}

namespace {

// Scale for squared-band rows, keeps the values in natural control units.
double band_scale(const ocp::NormBand& band) {
  return 2.0 * std::max({1.0, std::abs(band.lower), std::abs(band.upper)});
}

int structured_node_rows(const ocp::StructuredConstraint& c, int N) {
  if (std::holds_alternative<ocp::MinSeparationFromPoint>(c)) return N + 1;
  if (const auto* pw = std::get_if<ocp::MinSeparationPairwise>(&c)) {
    return pw->mode == ocp::SeparationMode::spatial ? (N + 1) * (N + 1) : N + 1;
  }
  const auto& band = std::get<ocp::NormBand>(c);
  return (band.lower > 0.0 ? 2 : 1) * (N + 1);
}

int structured_cert_rows(const ocp::StructuredConstraint& c) {
  if (std::holds_alternative<ocp::NormBand>(c)) {
    return std::get<ocp::NormBand>(c).lower > 0.0 ? 2 : 1;
  }
  return 1;
}

}  // namespace

bool TranscribedNlp::has_pure_state_rows() const {
  if (problem_->pure_state_path) return true;
  for (const auto& c : structured_) {
    if (ocp::is_pure_state(c)) return true;
  }
  return false;
}

VectorXd TranscribedNlp::pack(const MatrixXd& x_coeffs, const MatrixXd& u_coeffs,
                              double tf) const {
  const int N = layout_.order;
  if (x_coeffs.rows() != layout_.n_x || x_coeffs.cols() != N + 1 ||
      u_coeffs.rows() != layout_.n_u || u_coeffs.cols() != N + 1) {
    throw DimensionError("pack: coefficient block shape mismatch");
  }
  VectorXd z(layout_.num_vars);
  Eigen::Map<MatrixXd>(z.data() + layout_.x_offset, layout_.n_x, N + 1) = x_coeffs;
  Eigen::Map<MatrixXd>(z.data() + layout_.u_offset, layout_.n_u, N + 1) = u_coeffs;
  if (layout_.tf_offset >= 0) z[layout_.tf_offset] = tf;
  return z;
}

void TranscribedNlp::unpack(const VectorXd& z, MatrixXd& x_coeffs, MatrixXd& u_coeffs,
                            double& tf) const {
  if (z.size() != layout_.num_vars) throw DimensionError("unpack: wrong vector length");
  const int N = layout_.order;
  x_coeffs =
      Eigen::Map<const MatrixXd>(z.data() + layout_.x_offset, layout_.n_x, N + 1);
  u_coeffs =
      Eigen::Map<const MatrixXd>(z.data() + layout_.u_offset, layout_.n_u, N + 1);
  tf = layout_.tf_offset >= 0 ? z[layout_.tf_offset] : 0.0;
}

double TranscribedNlp::final_time(const VectorXd& z) const {
  if (free_tf_) return z[layout_.tf_offset];
  return t_start_ + domain_width_;
}

BernsteinPoly TranscribedNlp::state_poly(const VectorXd& z) const {
  MatrixXd x, u;
  double tf;
  unpack(z, x, u, tf);
  const double t1 = free_tf_ ? t_start_ + std::max(tf, 1e-9) : t_start_ + domain_width_;
  return BernsteinPoly(std::move(x), t_start_, t1);
}

BernsteinPoly TranscribedNlp::control_poly(const VectorXd& z) const {
  MatrixXd x, u;
  double tf;
  unpack(z, x, u, tf);
  const double t1 = free_tf_ ? t_start_ + std::max(tf, 1e-9) : t_start_ + domain_width_;
  return BernsteinPoly(std::move(u), t_start_, t1);
}

std::vector<double> TranscribedNlp::node_times(const VectorXd& z) const {
  const int N = layout_.order;
  const double width = free_tf_ ? std::max(final_time(z), 1e-9) : domain_width_;
  std::vector<double> ts(N + 1);
  for (int j = 0; j <= N; ++j) ts[j] = t_start_ + width * j / N;
  return ts;
}

struct TranscribedNlp::NodeEval {
  MatrixXd x, u;  // coefficients
  double tf = 0.0;
  MatrixXd X, U;  // values at the nodes
  MatrixXd Xdot;  // derivative values at the nodes
  double dyn_scale = 1.0;
};

TranscribedNlp::NodeEval TranscribedNlp::evaluate_nodes(const VectorXd& z) const {
  NodeEval ev;
  unpack(z, ev.x, ev.u, ev.tf);
  const int N = layout_.order;
  ev.X = ev.x * B_.transpose();
  ev.U = ev.u * B_.transpose();
  const MatrixXd diff = ev.x.rightCols(N) - ev.x.leftCols(N);
  ev.Xdot = (static_cast<double>(N) / domain_width_) * diff * Bd_.transpose();
  ev.dyn_scale = free_tf_ ? ev.tf : 1.0;
  return ev;
}

double TranscribedNlp::objective(const VectorXd& z) const {
  const NodeEval ev = evaluate_nodes(z);
  const auto& p = *problem_;
  const int N = layout_.order;
  double cost = 0.0;
  if (p.terminal_cost) cost += p.terminal_cost(ev.x.col(0), ev.x.col(N));
  if (free_tf_) cost += p.tf_cost_weight * ev.tf;
  if (p.running_cost) {
    double acc = 0.0;
    for (int j = 0; j <= N; ++j) acc += p.running_cost(ev.X.col(j), ev.U.col(j));
    cost += (free_tf_ ? ev.tf : 1.0) * w_ * acc;
  }
  return cost;
}

VectorXd TranscribedNlp::eq_constraints(const VectorXd& z) const {
  const NodeEval ev = evaluate_nodes(z);
  const auto& p = *problem_;
  const int N = layout_.order;
  VectorXd c(num_eq_);
  if (rows_.eq_defect_begin >= 0) {
    for (int j = 0; j <= N; ++j) {
      c.segment(rows_.eq_defect_begin + j * p.n_x, p.n_x) =
          ev.Xdot.col(j) - ev.dyn_scale * p.dynamics(ev.X.col(j), ev.U.col(j));
    }
  }
  if (p.n_e > 0) {
    c.segment(rows_.eq_boundary_begin, p.n_e) = p.boundary(ev.x.col(0), ev.x.col(N));
  }
  return c;
}

VectorXd TranscribedNlp::ineq_constraints(const VectorXd& z) const {
  const NodeEval ev = evaluate_nodes(z);
  const auto& p = *problem_;
  const int N = layout_.order;
  VectorXd c(num_ineq_);

  if (rows_.ineq_defect_upper_begin >= 0) {
    const double bound = delta_p_ / std::sqrt(static_cast<double>(p.n_x));
    for (int j = 0; j <= N; ++j) {
      const VectorXd d =
          ev.Xdot.col(j) - ev.dyn_scale * p.dynamics(ev.X.col(j), ev.U.col(j));
      c.segment(rows_.ineq_defect_upper_begin + j * p.n_x, p.n_x) =
          d.array() - bound;
      c.segment(rows_.ineq_defect_lower_begin + j * p.n_x, p.n_x) =
          -d.array() - bound;
    }
  }
  if (p.n_h > 0) {
    for (int j = 0; j <= N; ++j) {
      c.segment(rows_.ineq_path_begin + j * p.n_h, p.n_h) =
          p.path(ev.X.col(j), ev.U.col(j)).array() - delta_p_;
    }
  }
  if (rows_.ineq_tf_begin >= 0) {
    c[rows_.ineq_tf_begin] = tf_lower_ - ev.tf;
    c[rows_.ineq_tf_begin + 1] = ev.tf - tf_upper_;
  }

  if (!structured_.empty()) {
    int at = rows_.ineq_structured_begin;
    // Node rows.
    for (const auto& sc : structured_) {
      if (const auto* sep = std::get_if<ocp::MinSeparationFromPoint>(&sc)) {
        const double E = sep->clearance;
        for (int j = 0; j <= N; ++j) {
          double d2 = 0.0;
          for (size_t r = 0; r < sep->state_indices.size(); ++r) {
            const double diff = ev.X(sep->state_indices[r], j) - sep->point[r];
            d2 += diff * diff;
          }
          c[at++] = (E * E - d2) / (2.0 * E);
        }
      } else if (const auto* pw = std::get_if<ocp::MinSeparationPairwise>(&sc)) {
        const double E = pw->clearance;
        const int m = static_cast<int>(pw->indices_a.size());
        if (pw->mode == ocp::SeparationMode::temporal) {
          for (int j = 0; j <= N; ++j) {
            double d2 = 0.0;
            for (int r = 0; r < m; ++r) {
              const double diff =
                  ev.X(pw->indices_a[r], j) - ev.X(pw->indices_b[r], j);
              d2 += diff * diff;
            }
            c[at++] = (E * E - d2) / (2.0 * E);
          }
        } else {
          for (int j = 0; j <= N; ++j) {
            for (int l = 0; l <= N; ++l) {
              double d2 = 0.0;
              for (int r = 0; r < m; ++r) {
                const double diff =
                    ev.X(pw->indices_a[r], j) - ev.X(pw->indices_b[r], l);
                d2 += diff * diff;
              }
              c[at++] = (E * E - d2) / (2.0 * E);
            }
          }
        }
      } else {
        const auto& band = std::get<ocp::NormBand>(sc);
        const double sc_f = band_scale(band);
        for (int j = 0; j <= N; ++j) {
          double s = 0.0;
          for (int idx : band.control_indices) {
            s += ev.U(idx, j) * ev.U(idx, j);
          }
          if (band.lower > 0.0) c[at++] = (band.lower * band.lower - s) / sc_f;
          c[at++] = (s - band.upper * band.upper) / sc_f;
        }
      }
    }
    // Whole-interval certificates.
    if (certify_) {
      try {
        for (const auto& sc : structured_) {
          if (const auto* sep = std::get_if<ocp::MinSeparationFromPoint>(&sc)) {
            BernsteinPoly proj(ev.x(sep->state_indices, Eigen::all), 0.0, 1.0);
            const auto res = geometry::curve_point_distance(proj, sep->point,
                                                            geometry_tol_,
                                                            geometry_budget_);
            c[at++] = sep->clearance - res.lower;
          } else if (const auto* pw = std::get_if<ocp::MinSeparationPairwise>(&sc)) {
            const MatrixXd pa = ev.x(pw->indices_a, Eigen::all);
            const MatrixXd pb = ev.x(pw->indices_b, Eigen::all);
            if (pw->mode == ocp::SeparationMode::temporal) {
              BernsteinPoly diff(pa - pb, 0.0, 1.0);
              const auto res = geometry::curve_point_distance(
                  diff, VectorXd::Zero(pa.rows()), geometry_tol_, geometry_budget_);
              c[at++] = pw->clearance - res.lower;
            } else {
              const auto res =
                  geometry::curve_min_distance(BernsteinPoly(pa, 0.0, 1.0),
                                               BernsteinPoly(pb, 0.0, 1.0),
                                               geometry_tol_, geometry_budget_);
              c[at++] = pw->clearance - res.lower;
            }
          } else {
            const auto& band = std::get<ocp::NormBand>(sc);
            BernsteinPoly sq = BernsteinPoly::constant(VectorXd::Zero(1), 0.0, 1.0,
                                                       2 * layout_.order);
            for (int idx : band.control_indices) {
              BernsteinPoly ui(ev.u.row(idx), 0.0, 1.0);
              sq = poly_sum(sq, poly_product(ui, ui));
            }
            const auto ex =
                geometry::scalar_extrema(sq, geometry_tol_, geometry_budget_);
            const double sc_f = band_scale(band);
            if (band.lower > 0.0) {
              c[at++] = (band.lower * band.lower - ex.min_lower) / sc_f;
            }
            c[at++] = (ex.max_upper - band.upper * band.upper) / sc_f;
          }
        }
      } catch (const NumericalError& e) {
        // Budget exhaustion at a trial point: report as an evaluation
        // failure so the solver backtracks instead of dying.
        throw EvaluationError(e.what());
      }
    }
  }
  return c;
}

Eigen::VectorXd TranscribedNlp::objective_gradient(const VectorXd& z) const {
  const NodeEval ev = evaluate_nodes(z);
  const auto& p = *problem_;
  const int N = layout_.order;
  VectorXd g = VectorXd::Zero(layout_.num_vars);
  auto xg = [&](int k) {
    return g.segment(layout_.x_offset + k * p.n_x, p.n_x);
  };
  auto ug = [&](int k) {
    return g.segment(layout_.u_offset + k * p.n_u, p.n_u);
  };

  if (p.terminal_cost) {
    xg(0) += p.terminal_grad_x0(ev.x.col(0), ev.x.col(N));
    xg(N) += p.terminal_grad_xf(ev.x.col(0), ev.x.col(N));
  }
  if (free_tf_) g[layout_.tf_offset] += p.tf_cost_weight;
  if (p.running_cost) {
    const double scale = (free_tf_ ? ev.tf : 1.0) * w_;
    double fsum = 0.0;
    for (int j = 0; j <= N; ++j) {
      const VectorXd fx = p.running_grad_x(ev.X.col(j), ev.U.col(j));
      const VectorXd fu = p.running_grad_u(ev.X.col(j), ev.U.col(j));
      for (int k = 0; k <= N; ++k) {
        const double b = B_(j, k);
        if (b == 0.0) continue;
        xg(k) += scale * b * fx;
        if (p.n_u > 0) ug(k) += scale * b * fu;
      }
      if (free_tf_) fsum += p.running_cost(ev.X.col(j), ev.U.col(j));
    }
    if (free_tf_) g[layout_.tf_offset] += w_ * fsum;
  }
  return g;
}

namespace {

// d(derivative value at node j) / d(coefficient k), without the 1/width and
// N factors.
inline double diff_weight(const MatrixXd& Bd, int j, int k, int N) {
  double v = 0.0;
  if (k >= 1) v += Bd(j, k - 1);
  if (k <= N - 1) v -= Bd(j, k);
  return v;
}

}  // namespace

Eigen::MatrixXd TranscribedNlp::eq_jacobian(const VectorXd& z) const {
  const NodeEval ev = evaluate_nodes(z);
  const auto& p = *problem_;
  const int N = layout_.order;
  MatrixXd J = MatrixXd::Zero(num_eq_, layout_.num_vars);

  if (rows_.eq_defect_begin >= 0) {
    const double dscale = static_cast<double>(N) / domain_width_;
    for (int j = 0; j <= N; ++j) {
      const int row0 = rows_.eq_defect_begin + j * p.n_x;
      const MatrixXd fx = p.dynamics_jac_x(ev.X.col(j), ev.U.col(j));
      const MatrixXd fu = p.dynamics_jac_u(ev.X.col(j), ev.U.col(j));
      for (int k = 0; k <= N; ++k) {
        const double dw = dscale * diff_weight(Bd_, j, k, N);
        const double b = B_(j, k);
        auto xblock = J.block(row0, layout_.x_offset + k * p.n_x, p.n_x, p.n_x);
        if (dw != 0.0) {
          for (int i = 0; i < p.n_x; ++i) xblock(i, i) += dw;
        }
        if (b != 0.0) {
          xblock -= ev.dyn_scale * b * fx;
          if (p.n_u > 0) {
            J.block(row0, layout_.u_offset + k * p.n_u, p.n_x, p.n_u) -=
                ev.dyn_scale * b * fu;
          }
        }
      }
      if (free_tf_) {
        J.block(row0, layout_.tf_offset, p.n_x, 1) =
            -p.dynamics(ev.X.col(j), ev.U.col(j));
      }
    }
  }
  if (p.n_e > 0) {
    J.block(rows_.eq_boundary_begin, layout_.x_offset, p.n_e, p.n_x) =
        p.boundary_jac_x0(ev.x.col(0), ev.x.col(N));
    J.block(rows_.eq_boundary_begin, layout_.x_offset + N * p.n_x, p.n_e, p.n_x) +=
        p.boundary_jac_xf(ev.x.col(0), ev.x.col(N));
  }
  return J;
}

Eigen::MatrixXd TranscribedNlp::ineq_jacobian(const VectorXd& z) const {
  const NodeEval ev = evaluate_nodes(z);
  const auto& p = *problem_;
  const int N = layout_.order;
  MatrixXd J = MatrixXd::Zero(num_ineq_, layout_.num_vars);

  if (rows_.ineq_defect_upper_begin >= 0) {
    const double dscale = static_cast<double>(N) / domain_width_;
    for (int j = 0; j <= N; ++j) {
      const int up0 = rows_.ineq_defect_upper_begin + j * p.n_x;
      const int lo0 = rows_.ineq_defect_lower_begin + j * p.n_x;
      const MatrixXd fx = p.dynamics_jac_x(ev.X.col(j), ev.U.col(j));
      const MatrixXd fu = p.dynamics_jac_u(ev.X.col(j), ev.U.col(j));
      for (int k = 0; k <= N; ++k) {
        const double dw = dscale * diff_weight(Bd_, j, k, N);
        const double b = B_(j, k);
        MatrixXd dd = MatrixXd::Zero(p.n_x, p.n_x);
        for (int i = 0; i < p.n_x; ++i) dd(i, i) = dw;
        if (b != 0.0) dd -= ev.dyn_scale * b * fx;
        J.block(up0, layout_.x_offset + k * p.n_x, p.n_x, p.n_x) = dd;
        J.block(lo0, layout_.x_offset + k * p.n_x, p.n_x, p.n_x) = -dd;
        if (b != 0.0 && p.n_u > 0) {
          const MatrixXd du = -ev.dyn_scale * b * fu;
          J.block(up0, layout_.u_offset + k * p.n_u, p.n_x, p.n_u) = du;
          J.block(lo0, layout_.u_offset + k * p.n_u, p.n_x, p.n_u) = -du;
        }
      }
      if (free_tf_) {
        const VectorXd f = p.dynamics(ev.X.col(j), ev.U.col(j));
        J.block(up0, layout_.tf_offset, p.n_x, 1) = -f;
        J.block(lo0, layout_.tf_offset, p.n_x, 1) = f;
      }
    }
  }
  if (p.n_h > 0) {
    for (int j = 0; j <= N; ++j) {
      const int row0 = rows_.ineq_path_begin + j * p.n_h;
      const MatrixXd hx = p.path_jac_x(ev.X.col(j), ev.U.col(j));
      const MatrixXd hu = p.path_jac_u(ev.X.col(j), ev.U.col(j));
      for (int k = 0; k <= N; ++k) {
        const double b = B_(j, k);
        if (b == 0.0) continue;
        J.block(row0, layout_.x_offset + k * p.n_x, p.n_h, p.n_x) = b * hx;
        if (p.n_u > 0) {
          J.block(row0, layout_.u_offset + k * p.n_u, p.n_h, p.n_u) = b * hu;
        }
      }
    }
  }
  if (rows_.ineq_tf_begin >= 0) {
    J(rows_.ineq_tf_begin, layout_.tf_offset) = -1.0;
    J(rows_.ineq_tf_begin + 1, layout_.tf_offset) = 1.0;
  }

  if (!structured_.empty()) {
    int at = rows_.ineq_structured_begin;
    for (const auto& sc : structured_) {
      if (const auto* sep = std::get_if<ocp::MinSeparationFromPoint>(&sc)) {
        const double E = sep->clearance;
        const int m = static_cast<int>(sep->state_indices.size());
        for (int j = 0; j <= N; ++j) {
          for (int k = 0; k <= N; ++k) {
            const double b = B_(j, k);
            if (b == 0.0) continue;
            for (int r = 0; r < m; ++r) {
              const double diff = ev.X(sep->state_indices[r], j) - sep->point[r];
              J(at, layout_.x_offset + k * p.n_x + sep->state_indices[r]) -=
                  diff * b / E;
            }
          }
          ++at;
        }
      } else if (const auto* pw = std::get_if<ocp::MinSeparationPairwise>(&sc)) {
        const double E = pw->clearance;
        const int m = static_cast<int>(pw->indices_a.size());
        if (pw->mode == ocp::SeparationMode::temporal) {
          for (int j = 0; j <= N; ++j) {
            for (int k = 0; k <= N; ++k) {
              const double b = B_(j, k);
              if (b == 0.0) continue;
              for (int r = 0; r < m; ++r) {
                const double diff =
                    ev.X(pw->indices_a[r], j) - ev.X(pw->indices_b[r], j);
                J(at, layout_.x_offset + k * p.n_x + pw->indices_a[r]) -=
                    diff * b / E;
                J(at, layout_.x_offset + k * p.n_x + pw->indices_b[r]) +=
                    diff * b / E;
              }
            }
            ++at;
          }
        } else {
          for (int j = 0; j <= N; ++j) {
            for (int l = 0; l <= N; ++l) {
              for (int r = 0; r < m; ++r) {
                const double diff =
                    ev.X(pw->indices_a[r], j) - ev.X(pw->indices_b[r], l);
                for (int k = 0; k <= N; ++k) {
                  const double ba = B_(j, k);
                  const double bb = B_(l, k);
                  if (ba != 0.0) {
                    J(at, layout_.x_offset + k * p.n_x + pw->indices_a[r]) -=
                        diff * ba / E;
                  }
                  if (bb != 0.0) {
                    J(at, layout_.x_offset + k * p.n_x + pw->indices_b[r]) +=
                        diff * bb / E;
                  }
                }
              }
              ++at;
            }
          }
        }
      } else {
        const auto& band = std::get<ocp::NormBand>(sc);
        const double sc_f = band_scale(band);
        for (int j = 0; j <= N; ++j) {
          const int hi_row = band.lower > 0.0 ? at + 1 : at;
          for (int k = 0; k <= N; ++k) {
            const double b = B_(j, k);
            if (b == 0.0) continue;
            for (int idx : band.control_indices) {
              const double der = 2.0 * ev.U(idx, j) * b / sc_f;
              if (band.lower > 0.0) {
                J(at, layout_.u_offset + k * p.n_u + idx) -= der;
              }
              J(hi_row, layout_.u_offset + k * p.n_u + idx) += der;
            }
          }
          at = hi_row + 1;
        }
      }
    }

    if (certify_) {
      // Envelope gradients at the argmin parameters reported by the
      // geometric search.
      try {
        for (const auto& sc : structured_) {
          if (const auto* sep = std::get_if<ocp::MinSeparationFromPoint>(&sc)) {
            BernsteinPoly proj(ev.x(sep->state_indices, Eigen::all), 0.0, 1.0);
            const auto res = geometry::curve_point_distance(proj, sep->point,
                                                            geometry_tol_,
                                                            geometry_budget_);
            const VectorXd at_min = proj.eval(res.t_a);
            const VectorXd n_hat =
                (at_min - sep->point) / std::max(res.upper, 1e-12);
            const VectorXd basis = basis_row(N, res.t_a);
            const int m = static_cast<int>(sep->state_indices.size());
            for (int k = 0; k <= N; ++k) {
              for (int r = 0; r < m; ++r) {
                J(at, layout_.x_offset + k * p.n_x + sep->state_indices[r]) =
                    -n_hat[r] * basis[k];
              }
            }
            ++at;
          } else if (const auto* pw = std::get_if<ocp::MinSeparationPairwise>(&sc)) {
            const MatrixXd pa = ev.x(pw->indices_a, Eigen::all);
            const MatrixXd pb = ev.x(pw->indices_b, Eigen::all);
            const int m = static_cast<int>(pw->indices_a.size());
            if (pw->mode == ocp::SeparationMode::temporal) {
              BernsteinPoly diff(pa - pb, 0.0, 1.0);
              const auto res = geometry::curve_point_distance(
                  diff, VectorXd::Zero(m), geometry_tol_, geometry_budget_);
              const VectorXd n_hat = diff.eval(res.t_a) / std::max(res.upper, 1e-12);
              const VectorXd basis = basis_row(N, res.t_a);
              for (int k = 0; k <= N; ++k) {
                for (int r = 0; r < m; ++r) {
                  J(at, layout_.x_offset + k * p.n_x + pw->indices_a[r]) =
                      -n_hat[r] * basis[k];
                  J(at, layout_.x_offset + k * p.n_x + pw->indices_b[r]) =
                      n_hat[r] * basis[k];
                }
              }
              ++at;
            } else {
              BernsteinPoly poly_a(pa, 0.0, 1.0);
              BernsteinPoly poly_b(pb, 0.0, 1.0);
              const auto res = geometry::curve_min_distance(poly_a, poly_b,
                                                            geometry_tol_,
                                                            geometry_budget_);
              const VectorXd n_hat = (poly_a.eval(res.t_a) - poly_b.eval(res.t_b)) /
                                     std::max(res.upper, 1e-12);
              const VectorXd basis_a = basis_row(N, res.t_a);
              const VectorXd basis_b = basis_row(N, res.t_b);
              for (int k = 0; k <= N; ++k) {
                for (int r = 0; r < m; ++r) {
                  J(at, layout_.x_offset + k * p.n_x + pw->indices_a[r]) =
                      -n_hat[r] * basis_a[k];
                  J(at, layout_.x_offset + k * p.n_x + pw->indices_b[r]) =
                      n_hat[r] * basis_b[k];
                }
              }
              ++at;
            }
          } else {
            const auto& band = std::get<ocp::NormBand>(sc);
            BernsteinPoly sq = BernsteinPoly::constant(VectorXd::Zero(1), 0.0, 1.0,
                                                       2 * layout_.order);
            for (int idx : band.control_indices) {
              BernsteinPoly ui(ev.u.row(idx), 0.0, 1.0);
              sq = poly_sum(sq, poly_product(ui, ui));
            }
            const auto ex =
                geometry::scalar_extrema(sq, geometry_tol_, geometry_budget_);
            const double sc_f = band_scale(band);
            if (band.lower > 0.0) {
              const VectorXd basis = basis_row(N, ex.argmin);
              for (int k = 0; k <= N; ++k) {
                for (int idx : band.control_indices) {
                  // u value at the argmin via the node basis
                  double uval = 0.0;
                  for (int kk = 0; kk <= N; ++kk) uval += ev.u(idx, kk) * basis[kk];
                  J(at, layout_.u_offset + k * p.n_u + idx) =
                      -2.0 * uval * basis[k] / sc_f;
                }
              }
              ++at;
            }
            const VectorXd basis = basis_row(N, ex.argmax);
            for (int k = 0; k <= N; ++k) {
              for (int idx : band.control_indices) {
                double uval = 0.0;
                for (int kk = 0; kk <= N; ++kk) uval += ev.u(idx, kk) * basis[kk];
                J(at, layout_.u_offset + k * p.n_u + idx) =
                    2.0 * uval * basis[k] / sc_f;
              }
            }
            ++at;
          }
        }
      } catch (const NumericalError& e) {
        throw EvaluationError(e.what());
      }
    }
  }
  return J;
}

Eigen::VectorXd TranscribedNlp::initial_guess() const {
  MatrixXd x, u;
  double tf = 0.0;
  ocp::default_initial_guess(*problem_, layout_.order, x, u, tf);
  if (free_tf_) tf = std::min(std::max(tf, tf_lower_), tf_upper_);
  return pack(x, u, tf);
}

void TranscribedNlp::rebuild_row_index() {
  const auto& p = *problem_;
  const int N = layout_.order;
  eq_names_.clear();
  ineq_names_.clear();
  rows_ = RowRanges{};

  int eq_at = 0;
  if (delta_p_ == 0.0) {
    rows_.eq_defect_begin = eq_at;
    for (int j = 0; j <= N; ++j) {
      for (int i = 0; i < p.n_x; ++i) {
        eq_names_.push_back("defect_n" + std::to_string(j) + "_x" + std::to_string(i));
      }
    }
    eq_at += p.n_x * (N + 1);
  }
  if (p.n_e > 0) {
    rows_.eq_boundary_begin = eq_at;
    for (int i = 0; i < p.n_e; ++i) {
      eq_names_.push_back("boundary_" + std::to_string(i));
    }
    eq_at += p.n_e;
  }
  num_eq_ = eq_at;

  int at = 0;
  if (delta_p_ > 0.0) {
    rows_.ineq_defect_upper_begin = at;
    for (int j = 0; j <= N; ++j) {
      for (int i = 0; i < p.n_x; ++i) {
        ineq_names_.push_back("defect_upper_n" + std::to_string(j) + "_x" +
                              std::to_string(i));
      }
    }
    at += p.n_x * (N + 1);
    rows_.ineq_defect_lower_begin = at;
    for (int j = 0; j <= N; ++j) {
      for (int i = 0; i < p.n_x; ++i) {
        ineq_names_.push_back("defect_lower_n" + std::to_string(j) + "_x" +
                              std::to_string(i));
      }
    }
    at += p.n_x * (N + 1);
  }
  if (p.n_h > 0) {
    rows_.ineq_path_begin = at;
    for (int j = 0; j <= N; ++j) {
      for (int i = 0; i < p.n_h; ++i) {
        ineq_names_.push_back("path_n" + std::to_string(j) + "_h" + std::to_string(i));
      }
    }
    at += p.n_h * (N + 1);
  }
  if (free_tf_) {
    rows_.ineq_tf_begin = at;
    ineq_names_.push_back("tf_lower");
    ineq_names_.push_back("tf_upper");
    at += 2;
  }
  if (!structured_.empty()) {
    rows_.ineq_structured_begin = at;
    for (const auto& sc : structured_) {
      const std::string& label = ocp::constraint_label(sc);
      if (const auto* pw = std::get_if<ocp::MinSeparationPairwise>(&sc);
          pw && pw->mode == ocp::SeparationMode::spatial) {
        for (int j = 0; j <= N; ++j) {
          for (int l = 0; l <= N; ++l) {
            ineq_names_.push_back(label + "_n" + std::to_string(j) + "_" +
                                  std::to_string(l));
          }
        }
      } else if (const auto* band = std::get_if<ocp::NormBand>(&sc)) {
        for (int j = 0; j <= N; ++j) {
          if (band->lower > 0.0) {
            ineq_names_.push_back(label + "_lo_n" + std::to_string(j));
          }
          ineq_names_.push_back(label + "_hi_n" + std::to_string(j));
        }
      } else {
        for (int j = 0; j <= N; ++j) {
          ineq_names_.push_back(label + "_n" + std::to_string(j));
        }
      }
      at += structured_node_rows(sc, N);
    }
    if (certify_) {
      for (const auto& sc : structured_) {
        const std::string& label = ocp::constraint_label(sc);
        if (const auto* band = std::get_if<ocp::NormBand>(&sc)) {
          if (band->lower > 0.0) ineq_names_.push_back(label + "_cert_lo");
          ineq_names_.push_back(label + "_cert_hi");
        } else {
          ineq_names_.push_back(label + "_cert");
        }
        at += structured_cert_rows(sc);
      }
    }
  }
  num_ineq_ = at;
}

TranscribedNlp transcribe(const ocp::OcpProblem& problem, int N,
                          const TranscribeOptions& opts) {
  if (N < 1) throw ArgumentError("transcribe: order must be >= 1");
  {
    const ocp::ValidationReport report = ocp::validate(problem);
    if (!report.ok()) {
      std::ostringstream oss;
      oss << "transcribe: problem failed validation:";
      for (const auto& v : report.violations) oss << " [" << v << "]";
      throw ArgumentError(oss.str());
    }
  }

  TranscribedNlp nlp;
  nlp.problem_ = std::make_shared<const ocp::OcpProblem>(problem);
  nlp.layout_.n_x = problem.n_x;
  nlp.layout_.n_u = problem.n_u;
  nlp.layout_.order = N;
  nlp.layout_.x_offset = 0;
  nlp.layout_.u_offset = problem.n_x * (N + 1);
  nlp.free_tf_ = problem.has_free_final_time();
  nlp.layout_.tf_offset =
      nlp.free_tf_ ? (problem.n_x + problem.n_u) * (N + 1) : -1;
  nlp.layout_.num_vars = (problem.n_x + problem.n_u) * (N + 1) + (nlp.free_tf_ ? 1 : 0);

  if (const auto* fixed = std::get_if<ocp::FixedHorizon>(&problem.horizon)) {
    nlp.t_start_ = fixed->t0;
    nlp.domain_width_ = fixed->t1 - fixed->t0;
  } else {
    const auto& free = std::get<ocp::FreeFinalTime>(problem.horizon);
    nlp.t_start_ = free.t0;
    nlp.domain_width_ = 1.0;  // transcribed on the unit interval
    nlp.tf_lower_ = free.tf_lower;
    nlp.tf_upper_ = free.tf_upper;
  }
  nlp.w_ = nlp.domain_width_ / (N + 1);
  nlp.delta_p_ = delta_schedule(N, opts.delta_mode, opts.c_p, opts.delta_custom);
  nlp.analytic_ = problem.has_all_gradients();
  nlp.geometry_tol_ = opts.geometry_tol;
  nlp.geometry_budget_ = opts.geometry_budget;

  nlp.B_.resize(N + 1, N + 1);
  nlp.Bd_.resize(N + 1, N);
  for (int j = 0; j <= N; ++j) {
    const double s = static_cast<double>(j) / N;
    nlp.B_.row(j) = basis_row(N, s).transpose();
    nlp.Bd_.row(j) = basis_row(N - 1, s).transpose();
  }

  nlp.rebuild_row_index();
  return nlp;
}

TranscribedNlp attach_structured(const TranscribedNlp& nlp,
                                 const std::vector<ocp::StructuredConstraint>& constraints,
                                 bool certify) {
  for (const auto& c : constraints) {
    ocp::ProblemBundle probe;
    probe.problem = nlp.problem();
    probe.constraints = {c};
    const auto report = ocp::validate(probe);
    if (!report.ok()) {
      throw ArgumentError("attach_structured: " + report.violations.front());
    }
  }
  TranscribedNlp out = nlp;
  out.structured_.insert(out.structured_.end(), constraints.begin(), constraints.end());
  out.certify_ = certify;
  out.rebuild_row_index();
  return out;
}

TranscribedNlp transcribe_bundle(const ocp::ProblemBundle& bundle,
                                 const TranscribeOptions& opts) {
  TranscribedNlp nlp = transcribe(bundle.problem, opts.order, opts);
  if (bundle.constraints.empty()) return nlp;
  return attach_structured(nlp, bundle.constraints, opts.certify);
}

}  // namespace bernopt::transcription
