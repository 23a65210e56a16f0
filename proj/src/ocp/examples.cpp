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

#include "ocp/examples.hpp"

#include <cmath>
#include <sstream>

namespace bernopt::ocp {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Keeps sqrt(y) total when the solver probes y < 0.
constexpr double kSqrtGuard = 1e-12;

ProblemBundle example1() {
  OcpProblem p;
  p.name = "example1";
  p.n_x = 1;
  p.n_u = 1;
  p.n_e = 2;
  p.n_h = 0;
  p.horizon = FixedHorizon{0.0, 5.0};
  p.running_cost = [](const VectorXd& x, const VectorXd& u) {
    return 0.5 * (x[0] + u[0] * u[0]);
  };
  p.running_grad_x = [](const VectorXd&, const VectorXd&) {
    return VectorXd::Constant(1, 0.5);
  };
  p.running_grad_u = [](const VectorXd&, const VectorXd& u) {
    return VectorXd::Constant(1, u[0]);
  };
  p.dynamics = [](const VectorXd& x, const VectorXd& u) {
    VectorXd f(1);
    f[0] = 2.0 * x[0] + 2.0 * u[0] * std::sqrt(std::max(x[0], kSqrtGuard));
    return f;
  };
  p.dynamics_jac_x = [](const VectorXd& x, const VectorXd& u) {
    MatrixXd j(1, 1);
    j(0, 0) = 2.0;
    if (x[0] > kSqrtGuard) j(0, 0) += u[0] / std::sqrt(x[0]);
    return j;
  };
  p.dynamics_jac_u = [](const VectorXd& x, const VectorXd&) {
    MatrixXd j(1, 1);
    j(0, 0) = 2.0 * std::sqrt(std::max(x[0], kSqrtGuard));
    return j;
  };
  p.boundary = [](const VectorXd& x0, const VectorXd& xf) {
    VectorXd e(2);
    e << x0[0] - 2.0, xf[0] - 1.0;
    return e;
  };
  p.boundary_jac_x0 = [](const VectorXd&, const VectorXd&) {
    MatrixXd j = MatrixXd::Zero(2, 1);
    j(0, 0) = 1.0;
    return j;
  };
  p.boundary_jac_xf = [](const VectorXd&, const VectorXd&) {
    MatrixXd j = MatrixXd::Zero(2, 1);
    j(1, 0) = 1.0;
    return j;
  };
  p.x0_hint = VectorXd::Constant(1, 2.0);
  p.xf_hint = VectorXd::Constant(1, 1.0);

  ProblemBundle bundle;
  bundle.problem = std::move(p);
  bundle.reference.kind = ReferenceSpec::Kind::example1_file;
  bundle.reference.path = "data/example1_reference.csv";
  return bundle;
}

ProblemBundle example2() {
  OcpProblem p;
  p.name = "example2";
  p.n_x = 1;
  p.n_u = 1;
  p.n_e = 2;
  p.n_h = 2;
  p.horizon = FixedHorizon{0.0, 2.0};
  p.running_cost = [](const VectorXd& x, const VectorXd& u) {
    return 3.0 * u[0] - 2.0 * x[0];
  };
  p.running_grad_x = [](const VectorXd&, const VectorXd&) {
    return VectorXd::Constant(1, -2.0);
  };
  p.running_grad_u = [](const VectorXd&, const VectorXd&) {
    return VectorXd::Constant(1, 3.0);
  };
  p.dynamics = [](const VectorXd& x, const VectorXd& u) {
    VectorXd f(1);
    f[0] = x[0] + u[0];
    return f;
  };
  p.dynamics_jac_x = [](const VectorXd&, const VectorXd&) {
    return MatrixXd::Constant(1, 1, 1.0);
  };
  p.dynamics_jac_u = [](const VectorXd&, const VectorXd&) {
    return MatrixXd::Constant(1, 1, 1.0);
  };
  p.boundary = [](const VectorXd& x0, const VectorXd& xf) {
    VectorXd e(2);
    e << x0[0] - 4.0, xf[0] - 39.392;
    return e;
  };
  p.boundary_jac_x0 = [](const VectorXd&, const VectorXd&) {
    MatrixXd j = MatrixXd::Zero(2, 1);
    j(0, 0) = 1.0;
    return j;
  };
  p.boundary_jac_xf = [](const VectorXd&, const VectorXd&) {
    MatrixXd j = MatrixXd::Zero(2, 1);
    j(1, 0) = 1.0;
    return j;
  };
  // 0 <= u <= 2 in the h(x,u) <= 0 convention.
  p.path = [](const VectorXd&, const VectorXd& u) {
    VectorXd h(2);
    h << u[0] - 2.0, -u[0];
    return h;
  };
  p.path_jac_x = [](const VectorXd&, const VectorXd&) { return MatrixXd::Zero(2, 1); };
  p.path_jac_u = [](const VectorXd&, const VectorXd&) {
    MatrixXd j(2, 1);
    j << 1.0, -1.0;
    return j;
  };
  p.x0_hint = VectorXd::Constant(1, 4.0);
  p.xf_hint = VectorXd::Constant(1, 39.392);
  p.initial_guess = [](int N, MatrixXd& x, MatrixXd& u, double&) {
    for (int j = 0; j <= N; ++j) {
      const double s = static_cast<double>(j) / N;
      x(0, j) = 4.0 + (39.392 - 4.0) * s;
      u(0, j) = 1.0;  // band midpoint
    }
  };

  ProblemBundle bundle;
  bundle.problem = std::move(p);
  bundle.reference.kind = ReferenceSpec::Kind::example2_analytic;
  return bundle;
}

}  // namespace

ProblemBundle make_single_integrator(const SingleIntegratorParams& params) {
  const int d = static_cast<int>(params.start.size());
  if (d < 1 || params.goal.size() != d) {
    throw ArgumentError("single integrator: start/goal dimension mismatch");
  }
  OcpProblem p;
  p.name = "single_integrator";
  p.n_x = d;
  p.n_u = d;
  p.n_e = 2 * d;
  p.n_h = 0;
  p.horizon = FreeFinalTime{params.t0, params.tf_lower, params.tf_upper};
  p.tf_cost_weight = 1.0;  // minimize the time of arrival
  p.dynamics = [](const VectorXd&, const VectorXd& u) { return u; };
  p.dynamics_jac_x = [d](const VectorXd&, const VectorXd&) {
    return MatrixXd::Zero(d, d);
  };
  p.dynamics_jac_u = [d](const VectorXd&, const VectorXd&) {
    return MatrixXd::Identity(d, d);
  };
  const VectorXd start = params.start;
  const VectorXd goal = params.goal;
  p.boundary = [start, goal](const VectorXd& x0, const VectorXd& xf) {
    VectorXd e(start.size() + goal.size());
    e << x0 - start, xf - goal;
    return e;
  };
  p.boundary_jac_x0 = [d](const VectorXd&, const VectorXd&) {
    MatrixXd j = MatrixXd::Zero(2 * d, d);
    j.topRows(d).setIdentity();
    return j;
  };
  p.boundary_jac_xf = [d](const VectorXd&, const VectorXd&) {
    MatrixXd j = MatrixXd::Zero(2 * d, d);
    j.bottomRows(d).setIdentity();
    return j;
  };
  p.x0_hint = start;
  p.xf_hint = goal;
  const double mid_speed = 0.5 * (params.speed_min + params.speed_max);
  p.initial_guess = [start, goal, mid_speed](int N, MatrixXd& x, MatrixXd& u,
                                             double& tf) {
    const VectorXd diff = goal - start;
    const double dist = diff.norm();
    tf = std::max(dist / std::max(mid_speed, 1e-9), 1e-3);
    const VectorXd vel = diff / tf;
    for (int j = 0; j <= N; ++j) {
      const double s = static_cast<double>(j) / N;
      x.col(j) = start + s * diff;
      u.col(j) = vel;
    }
  };

  ProblemBundle bundle;
  bundle.problem = std::move(p);

  std::vector<int> all_states(d);
  std::vector<int> all_controls(d);
  for (int i = 0; i < d; ++i) all_states[i] = all_controls[i] = i;
  int obstacle_no = 0;
  for (const auto& [center, clearance] : params.obstacles) {
    MinSeparationFromPoint sep;
    std::ostringstream label;
    label << "obstacle" << ++obstacle_no;
    sep.label = label.str();
    sep.state_indices = all_states;
    sep.point = center;
    sep.clearance = clearance;
    bundle.constraints.push_back(std::move(sep));
  }
  NormBand band;
  band.label = "speed";
  band.control_indices = all_controls;
  band.lower = params.speed_min;
  band.upper = params.speed_max;
  bundle.constraints.push_back(std::move(band));
  return bundle;
}

ProblemBundle make_dubins_fleet(const DubinsFleetParams& params) {
  const int k = static_cast<int>(params.vehicles.size());
  if (k < 1) throw ArgumentError("dubins fleet: at least one vehicle required");
  OcpProblem p;
  p.name = "dubins_fleet";
  p.n_x = 3 * k;
  p.n_u = 2 * k;
  p.n_e = 5 * k;  // full initial state + final position per vehicle
  p.n_h = 0;
  p.horizon = FreeFinalTime{params.t0, params.tf_lower, params.tf_upper};
  p.tf_cost_weight = 1.0;

  p.dynamics = [k](const VectorXd& x, const VectorXd& u) {
    VectorXd f(3 * k);
    for (int i = 0; i < k; ++i) {
      const double psi = x[3 * i + 2];
      const double v = u[2 * i];
      const double omega = u[2 * i + 1];
      f[3 * i] = v * std::cos(psi);
      f[3 * i + 1] = v * std::sin(psi);
      f[3 * i + 2] = omega;
    }
    return f;
  };
  p.dynamics_jac_x = [k](const VectorXd& x, const VectorXd& u) {
    MatrixXd j = MatrixXd::Zero(3 * k, 3 * k);
    for (int i = 0; i < k; ++i) {
      const double psi = x[3 * i + 2];
      const double v = u[2 * i];
      j(3 * i, 3 * i + 2) = -v * std::sin(psi);
      j(3 * i + 1, 3 * i + 2) = v * std::cos(psi);
    }
    return j;
  };
  p.dynamics_jac_u = [k](const VectorXd& x, const VectorXd&) {
    MatrixXd j = MatrixXd::Zero(3 * k, 2 * k);
    for (int i = 0; i < k; ++i) {
      const double psi = x[3 * i + 2];
      j(3 * i, 2 * i) = std::cos(psi);
      j(3 * i + 1, 2 * i) = std::sin(psi);
      j(3 * i + 2, 2 * i + 1) = 1.0;
    }
    return j;
  };

  std::vector<Eigen::Vector3d> starts;
  std::vector<Eigen::Vector2d> goals;
  for (const auto& v : params.vehicles) {
    starts.push_back(v.start);
    goals.push_back(v.goal);
  }
  p.boundary = [k, starts, goals](const VectorXd& x0, const VectorXd& xf) {
    VectorXd e(5 * k);
    for (int i = 0; i < k; ++i) {
      e.segment(5 * i, 3) = x0.segment(3 * i, 3) - starts[i];
      e.segment(5 * i + 3, 2) = xf.segment(3 * i, 2) - goals[i];
    }
    return e;
  };
  p.boundary_jac_x0 = [k](const VectorXd&, const VectorXd&) {
    MatrixXd j = MatrixXd::Zero(5 * k, 3 * k);
    for (int i = 0; i < k; ++i) j.block(5 * i, 3 * i, 3, 3).setIdentity();
    return j;
  };
  p.boundary_jac_xf = [k](const VectorXd&, const VectorXd&) {
    MatrixXd j = MatrixXd::Zero(5 * k, 3 * k);
    for (int i = 0; i < k; ++i) j.block(5 * i + 3, 3 * i, 2, 2).setIdentity();
    return j;
  };

  p.x0_hint.resize(3 * k);
  p.xf_hint.resize(3 * k);
  for (int i = 0; i < k; ++i) {
    p.x0_hint.segment(3 * i, 3) = starts[i];
    const Eigen::Vector2d dir = goals[i] - starts[i].head<2>();
    p.xf_hint.segment(3 * i, 2) = goals[i];
    p.xf_hint[3 * i + 2] = std::atan2(dir.y(), dir.x());
  }
  const double mid_speed = 0.5 * (params.speed_min + params.speed_max);
  const Eigen::VectorXd x0_hint = p.x0_hint;
  const Eigen::VectorXd xf_hint = p.xf_hint;
  p.initial_guess = [k, x0_hint, xf_hint, mid_speed](int N, MatrixXd& x, MatrixXd& u,
                                                     double& tf) {
    double max_dist = 0.0;
    for (int i = 0; i < k; ++i) {
      max_dist = std::max(
          max_dist, (xf_hint.segment(3 * i, 2) - x0_hint.segment(3 * i, 2)).norm());
    }
    tf = std::max(max_dist / std::max(mid_speed, 1e-9), 1e-3);
    for (int j = 0; j <= N; ++j) {
      const double s = static_cast<double>(j) / N;
      x.col(j) = (1.0 - s) * x0_hint + s * xf_hint;
      for (int i = 0; i < k; ++i) {
        u(2 * i, j) = mid_speed;
        u(2 * i + 1, j) = 0.0;
      }
    }
  };

  ProblemBundle bundle;
  bundle.problem = std::move(p);

  for (int i = 0; i < k; ++i) {
    NormBand speed;
    speed.label = "speed_v" + std::to_string(i);
    speed.control_indices = {2 * i};
    speed.lower = params.speed_min;
    speed.upper = params.speed_max;
    bundle.constraints.push_back(std::move(speed));

    NormBand turn;
    turn.label = "turn_rate_v" + std::to_string(i);
    turn.control_indices = {2 * i + 1};
    turn.lower = 0.0;
    turn.upper = params.max_turn_rate;
    bundle.constraints.push_back(std::move(turn));
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      MinSeparationPairwise sep;
      sep.label = "separation_v" + std::to_string(i) + "_v" + std::to_string(j);
      sep.indices_a = {3 * i, 3 * i + 1};
      sep.indices_b = {3 * j, 3 * j + 1};
      sep.clearance = params.separation;
      sep.mode = params.separation_mode;
      bundle.constraints.push_back(std::move(sep));
    }
  }
  return bundle;
}

ProblemBundle builtin_example(int id, const ExampleOptions& opts) {
  switch (id) {
    case 1:
      return example1();
    case 2:
      return example2();
    case 3: {
      SingleIntegratorParams params;
      params.start = Eigen::Vector2d(-500.0, -900.0);
      params.goal = Eigen::Vector2d(1500.0, -600.0);
      params.obstacles = {
          {Eigen::Vector2d(0.0, -800.0), 50.0},
          {Eigen::Vector2d(450.0, -750.0), 50.0},
          {Eigen::Vector2d(850.0, -730.0), 50.0},
      };
      params.speed_min = 15.0;
      params.speed_max = 32.0;
      params.tf_lower = 20.0;
      params.tf_upper = 300.0;
      ProblemBundle bundle = make_single_integrator(params);
      bundle.problem.name = "example3";
      return bundle;
    }
    case 4: {
      if (opts.fleet_size < 2 || opts.fleet_size > 11) {
        throw ArgumentError("example 4: fleet size must be in 2..11");
      }
      // Ship formation: vehicles start on a vertical line and end in a
      // '>' shape. The source article does not publish formation
      // coordinates; these defaults are ours.
      DubinsFleetParams params;
      const int k = opts.fleet_size;
      const double mid = 0.5 * (k - 1);
      for (int i = 0; i < k; ++i) {
        DubinsFleetParams::Vehicle v;
        v.start = Eigen::Vector3d(0.0, 200.0 * i, 0.0);
        const double rank = std::abs(i - mid);
        v.goal = Eigen::Vector2d(1700.0 - 200.0 * rank, 200.0 * i);
        params.vehicles.push_back(v);
      }
      params.speed_min = 15.0;
      params.speed_max = 32.0;
      params.max_turn_rate = 0.3;
      params.separation = 50.0;
      params.separation_mode = opts.separation;
      params.tf_lower = 20.0;
      params.tf_upper = 300.0;
      ProblemBundle bundle = make_dubins_fleet(params);
      bundle.problem.name = "example4";
      return bundle;
    }
    default:
      throw ArgumentError("builtin_example: id must be 1..4");
  }
}

}  // namespace bernopt::ocp
