#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "solver/solver.hpp"
#include "support/oracles.hpp"

using namespace bernopt::solver;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// min 1/2 z'Qz + q'z  s.t.  A z = b, G z <= h
struct Qp : NlpProblem {
  MatrixXd Q, A, G;
  VectorXd q, b, h, guess;

  int num_vars() const override { return static_cast<int>(q.size()); }
  int num_eq() const override { return static_cast<int>(b.size()); }
  int num_ineq() const override { return static_cast<int>(h.size()); }
  double objective(const VectorXd& z) const override {
    return 0.5 * z.dot(Q * z) + q.dot(z);
  }
  VectorXd eq_constraints(const VectorXd& z) const override { return A * z - b; }
  VectorXd ineq_constraints(const VectorXd& z) const override { return G * z - h; }
  bool has_derivatives() const override { return true; }
  VectorXd objective_gradient(const VectorXd& z) const override { return Q * z + q; }
  MatrixXd eq_jacobian(const VectorXd&) const override { return A; }
  MatrixXd ineq_jacobian(const VectorXd&) const override { return G; }
  VectorXd initial_guess() const override {
    return guess.size() ? guess : VectorXd::Zero(num_vars());
  }
};

Qp make_qp(int n, const MatrixXd& Q, const VectorXd& q) {
  Qp qp;
  qp.Q = Q;
  qp.q = q;
  qp.A = MatrixXd(0, n);
  qp.b = VectorXd(0);
  qp.G = MatrixXd(0, n);
  qp.h = VectorXd(0);
  return qp;
}

// Exhaustive active-set enumeration for strictly convex QPs; the oracle the
// solver is checked against.
bool qp_oracle(const Qp& qp, VectorXd& z_out) {
  const int n = qp.num_vars();
  const int me = qp.num_eq();
  const int mi = qp.num_ineq();
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int mask = 0; mask < (1 << mi); ++mask) {
    std::vector<int> active;
    for (int i = 0; i < mi; ++i) {
      if (mask & (1 << i)) active.push_back(i);
    }
    const int ma = static_cast<int>(active.size());
    MatrixXd K = MatrixXd::Zero(n + me + ma, n + me + ma);
    VectorXd rhs(n + me + ma);
    K.topLeftCorner(n, n) = qp.Q;
    rhs.head(n) = -qp.q;
    if (me > 0) {
      K.block(0, n, n, me) = qp.A.transpose();
      K.block(n, 0, me, n) = qp.A;
      rhs.segment(n, me) = qp.b;
    }
    for (int i = 0; i < ma; ++i) {
      K.block(0, n + me + i, n, 1) = qp.G.row(active[i]).transpose();
      K.block(n + me + i, 0, 1, n) = qp.G.row(active[i]);
      rhs[n + me + i] = qp.h[active[i]];
    }
    Eigen::FullPivLU<MatrixXd> lu(K);
    if (!lu.isInvertible()) continue;
    const VectorXd sol = lu.solve(rhs);
    const VectorXd z = sol.head(n);
    bool ok = true;
    for (int i = 0; i < ma && ok; ++i) {
      if (sol[n + me + i] < -1e-10) ok = false;  // multipliers must be >= 0
    }
    for (int i = 0; i < mi && ok; ++i) {
      if (!(mask & (1 << i)) && qp.G.row(i).dot(z) > qp.h[i] + 1e-10) ok = false;
    }
    if (!ok) continue;
    const double val = qp.objective(z);
    if (val < best - 1e-12) {
      best = val;
      z_out = z;
      found = true;
    }
  }
  return found;
}

}  // namespace

TEST_SUITE_BEGIN("solver");

TEST_CASE("hand KKT: min x^2 subject to x >= 1") {
  Qp qp = make_qp(1, MatrixXd::Constant(1, 1, 2.0), VectorXd::Zero(1));
  qp.G = MatrixXd::Constant(1, 1, -1.0);  // 1 - x <= 0
  qp.h = VectorXd::Constant(1, -1.0);
  const NlpSolution sol = solve(qp);
  REQUIRE(sol.status == SolveStatus::converged);
  CHECK(sol.z[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.mult_ineq[0] == doctest::Approx(2.0).epsilon(1e-4));

  const KktResiduals kkt = kkt_residual_norms(qp, sol.z, sol.mult_eq, sol.mult_ineq);
  CHECK(kkt.stationarity <= 1e-6);
  CHECK(kkt.feasibility <= 1e-8);
  CHECK(kkt.complementarity <= 1e-6);
}

TEST_CASE("unconstrained quadratic reaches its vertex") {
  Qp qp = make_qp(1, MatrixXd::Constant(1, 1, 2.0), VectorXd::Constant(1, -6.0));
  const NlpSolution sol = solve(qp);  // (x-3)^2 up to a constant
  REQUIRE(sol.status == SolveStatus::converged);
  CHECK(sol.z[0] == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(sol.mult_eq.size() == 0);
  CHECK(sol.mult_ineq.size() == 0);
}

TEST_CASE("hand KKT: equality multiplier sign convention") {
  // min x + y s.t. x + y = 1; with L = f + lam' c the multiplier is -1.
  struct Lin : NlpProblem {
    int num_vars() const override { return 2; }
    int num_eq() const override { return 1; }
    double objective(const VectorXd& z) const override { return z.sum(); }
    VectorXd eq_constraints(const VectorXd& z) const override {
      return VectorXd::Constant(1, z.sum() - 1.0);
    }
    bool has_derivatives() const override { return true; }
    VectorXd objective_gradient(const VectorXd&) const override {
      return VectorXd::Ones(2);
    }
    MatrixXd eq_jacobian(const VectorXd&) const override {
      return MatrixXd::Ones(1, 2);
    }
  } lin;
  const NlpSolution sol = solve(lin);
  REQUIRE(sol.status == SolveStatus::converged);
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.mult_eq[0] == doctest::Approx(-1.0).epsilon(1e-5));
}

TEST_CASE("finite-difference gradient") {
  const VectorXd z = (VectorXd(2) << 1.0, 2.0).finished();
  const VectorXd g = fd_gradient(
      [](const VectorXd& v) { return 0.5 * v.squaredNorm(); }, z);
  CHECK((g - z).lpNorm<Eigen::Infinity>() <= 1e-7);

  const VectorXd g_sin = fd_gradient(
      [](const VectorXd& v) { return std::sin(v[0]); }, VectorXd::Zero(1));
  CHECK(std::abs(g_sin[0] - 1.0) <= 1e-8);

  CHECK_THROWS_AS(fd_gradient([](const VectorXd& v) { return std::sqrt(v[0]); },
                              VectorXd::Zero(1)),
                  bernopt::EvaluationError);
}

TEST_CASE("kkt residuals: interior optimum and random point") {
  Qp qp = make_qp(2, 2.0 * MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  qp.G = MatrixXd::Identity(2, 2);
  qp.h = VectorXd::Ones(2);  // z <= 1, inactive at the optimum z = 0
  const KktResiduals at_opt =
      kkt_residual_norms(qp, VectorXd::Zero(2), VectorXd(0), VectorXd::Zero(2));
  CHECK(at_opt.stationarity <= 1e-12);
  CHECK(at_opt.complementarity == 0.0);

  const KktResiduals off = kkt_residual_norms(qp, VectorXd::Ones(2) * 0.3,
                                              VectorXd(0), VectorXd::Zero(2));
  CHECK(off.stationarity > 0.0);
}

TEST_CASE("convex QP suite matches active-set enumeration oracle") {
  std::mt19937 rng(2001);
  int solved = 0;
  for (int inst = 0; inst < 12; ++inst) {
    const int n = 2 + static_cast<int>(rng() % 5);  // up to 6 variables
    MatrixXd M(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) M(i, j) = testsupport::uniform(rng, -1.0, 1.0);
    }
    Qp qp = make_qp(n, M.transpose() * M + MatrixXd::Identity(n, n), VectorXd::Zero(n));
    for (int i = 0; i < n; ++i) qp.q[i] = testsupport::uniform(rng, -2.0, 2.0);
    const int mi = 1 + static_cast<int>(rng() % 4);
    qp.G.resize(mi, n);
    qp.h.resize(mi);
    VectorXd interior(n);
    for (int i = 0; i < n; ++i) interior[i] = testsupport::uniform(rng, -0.5, 0.5);
    for (int i = 0; i < mi; ++i) {
      for (int j = 0; j < n; ++j) qp.G(i, j) = testsupport::uniform(rng, -1.0, 1.0);
      qp.h[i] = qp.G.row(i).dot(interior) + testsupport::uniform(rng, 0.05, 1.0);
    }
    VectorXd z_ref;
    REQUIRE(qp_oracle(qp, z_ref));
    const NlpSolution sol = solve(qp);
    REQUIRE(sol.status == SolveStatus::converged);
    CHECK((sol.z - z_ref).lpNorm<Eigen::Infinity>() <= 1e-6);
    ++solved;
  }
  CHECK(solved == 12);
}

TEST_CASE("iterate sequence is deterministic") {
  Qp qp = make_qp(3, 2.0 * MatrixXd::Identity(3, 3), VectorXd::Ones(3));
  qp.G = -MatrixXd::Identity(3, 3);
  qp.h = VectorXd::Constant(3, 0.5);
  std::vector<std::string> log_a, log_b;
  SolverOptions opts;
  opts.log_inner = true;
  opts.log = [&log_a](const std::string& line) { log_a.push_back(line); };
  const NlpSolution a = solve(qp, opts);
  opts.log = [&log_b](const std::string& line) { log_b.push_back(line); };
  const NlpSolution b = solve(qp, opts);
  CHECK(a.z == b.z);
  CHECK(log_a == log_b);
}

TEST_CASE("non-evaluable initial point reports numerical failure") {
  struct Bad : NlpProblem {
    int num_vars() const override { return 1; }
    double objective(const VectorXd& z) const override { return std::sqrt(z[0] - 1.0); }
  } bad;
  const NlpSolution sol = solve(bad);
  CHECK(sol.status == SolveStatus::numerical_failure);
}

TEST_CASE("options parse from flat key-value pairs") {
  SolverOptions opts = SolverOptions::from_keyvalues(
      {{"stationarity_tol", "1e-4"}, {"max_outer", "7"}, {"fd_scheme", "forward"}});
  CHECK(opts.stationarity_tol == doctest::Approx(1e-4));
  CHECK(opts.max_outer == 7);
  CHECK(opts.fd_scheme == FdScheme::forward);
  CHECK_THROWS_AS(SolverOptions::from_keyvalues({{"bogus", "1"}}), bernopt::ArgumentError);
  CHECK_THROWS_AS(SolverOptions::from_keyvalues({{"max_outer", "abc"}}),
                  bernopt::ArgumentError);
}

TEST_SUITE_END();
