#include <doctest.h>

#include <cmath>
#include <random>

#include "core/geometry.hpp"
#include "ocp/examples.hpp"
#include "transcription/transcription.hpp"
#include "support/oracles.hpp"

using namespace bernopt;
using namespace bernopt::transcription;
using bernopt::ocp::builtin_example;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Analytic bang-bang solution of the second built-in example.
struct Example2Exact {
  double ts;
  Example2Exact() { ts = 2.0 - std::log((6.0 * std::exp(2.0) - 39.392) / 2.0); }
  double y(double t) const {
    if (t <= ts) return 6.0 * std::exp(t) - 2.0;
    return (6.0 * std::exp(ts) - 2.0) * std::exp(t - ts);
  }
  double u(double t) const { return t <= ts ? 2.0 : 0.0; }
};

ocp::OcpProblem integrator_1d() {
  ocp::OcpProblem p;
  p.name = "integrator";
  p.n_x = 1;
  p.n_u = 1;
  p.n_e = 0;
  p.n_h = 0;
  p.horizon = ocp::FixedHorizon{0.0, 1.0};
  p.dynamics = [](const VectorXd&, const VectorXd& u) { return u; };
  p.dynamics_jac_x = [](const VectorXd&, const VectorXd&) { return MatrixXd::Zero(1, 1); };
  p.dynamics_jac_u = [](const VectorXd&, const VectorXd&) { return MatrixXd::Ones(1, 1); };
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("transcription");

TEST_CASE("delta schedule") {
  CHECK(delta_schedule(10, DeltaMode::corollary, 1.0) == doctest::Approx(0.1));
  CHECK(delta_schedule(17, DeltaMode::exact, 123.0) == 0.0);
  CHECK(delta_schedule(20, DeltaMode::corollary, 1.0) /
            delta_schedule(10, DeltaMode::corollary, 1.0) ==
        doctest::Approx(0.5));
  CHECK(delta_schedule(5, DeltaMode::custom, 0.0, 0.25) == 0.25);
  CHECK_THROWS_AS(delta_schedule(10, DeltaMode::corollary, -1.0), ArgumentError);
  CHECK_THROWS_AS(delta_schedule(0, DeltaMode::exact, 1.0), ArgumentError);
}

TEST_CASE("node matrix properties") {
  const TranscribedNlp nlp = transcribe(builtin_example(1).problem, 12);
  const MatrixXd& B = nlp.node_matrix();
  for (int j = 0; j < B.rows(); ++j) {
    CHECK(std::abs(B.row(j).sum() - 1.0) <= 1e-12);
  }
  CHECK(B(0, 0) == 1.0);
  CHECK(B.row(0).tail(B.cols() - 1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(B(B.rows() - 1, B.cols() - 1) == 1.0);
  CHECK(nlp.weight() == doctest::Approx(5.0 / 13.0));
  CHECK(nlp.delta_p() == 0.0);
}

TEST_CASE("pack and unpack are inverse bijections") {
  const TranscribedNlp nlp = transcribe(builtin_example(3).problem, 6);
  std::mt19937 rng(3);
  MatrixXd x(2, 7), u(2, 7);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 7; ++j) {
      x(i, j) = testsupport::uniform(rng, -5, 5);
      u(i, j) = testsupport::uniform(rng, -5, 5);
    }
  }
  const VectorXd z = nlp.pack(x, u, 42.0);
  CHECK(z.size() == nlp.num_vars());
  MatrixXd x2, u2;
  double tf = 0;
  nlp.unpack(z, x2, u2, tf);
  CHECK(x2 == x);
  CHECK(u2 == u);
  CHECK(tf == 42.0);

  const VectorXd zz = nlp.pack(MatrixXd::Zero(2, 7), MatrixXd::Zero(2, 7), 0.0);
  CHECK(zz.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exact linear solution has zero defects") {
  const TranscribedNlp nlp = transcribe(integrator_1d(), 1);
  MatrixXd x(1, 2), u(1, 2);
  x << 0.0, 1.0;
  u << 1.0, 1.0;
  const VectorXd z = nlp.pack(x, u);
  CHECK(nlp.eq_constraints(z).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("constant running cost integrates to the horizon length") {
  ocp::OcpProblem p = integrator_1d();
  p.running_cost = [](const VectorXd&, const VectorXd&) { return 1.0; };
  p.running_grad_x = [](const VectorXd&, const VectorXd&) { return VectorXd::Zero(1); };
  p.running_grad_u = [](const VectorXd&, const VectorXd&) { return VectorXd::Zero(1); };
  for (int N : {1, 4, 9, 33}) {
    const TranscribedNlp nlp = transcribe(p, N);
    const VectorXd z = VectorXd::Zero(nlp.num_vars());
    CHECK(nlp.objective(z) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("node-mode cost equals the quadrature of running-cost samples") {
  const ocp::ProblemBundle bundle = ocp::builtin_example(2);
  const int N = 9;
  const TranscribedNlp nlp = transcribe(bundle.problem, N);
  std::mt19937 rng(5);
  MatrixXd x(1, N + 1), u(1, N + 1);
  for (int j = 0; j <= N; ++j) {
    x(0, j) = testsupport::uniform(rng, 0, 10);
    u(0, j) = testsupport::uniform(rng, 0, 2);
  }
  const VectorXd z = nlp.pack(x, u);
  // samples of F at the node values of the polynomials
  const MatrixXd Xn = x * nlp.node_matrix().transpose();
  const MatrixXd Un = u * nlp.node_matrix().transpose();
  MatrixXd F(1, N + 1);
  for (int j = 0; j <= N; ++j) {
    F(0, j) = bundle.problem.running_cost(Xn.col(j), Un.col(j));
  }
  CHECK(nlp.objective(z) ==
        doctest::Approx(quadrature(F, nlp.weight())[0]).epsilon(1e-12));
}

TEST_CASE("defects at a smooth exact solution shrink as N doubles") {
  // dx/dt = x on [0,1], x = e^t sampled at the nodes.
  ocp::OcpProblem p = integrator_1d();
  p.n_u = 0;
  p.dynamics = [](const VectorXd& x, const VectorXd&) { return x; };
  p.dynamics_jac_x = [](const VectorXd&, const VectorXd&) { return MatrixXd::Ones(1, 1); };
  p.dynamics_jac_u = [](const VectorXd&, const VectorXd&) { return MatrixXd::Zero(1, 0); };
  auto defect = [&p](int N) {
    const TranscribedNlp nlp = transcribe(p, N);
    MatrixXd x(1, N + 1);
    MatrixXd u(0, N + 1);
    for (int j = 0; j <= N; ++j) x(0, j) = std::exp(static_cast<double>(j) / N);
    return nlp.eq_constraints(nlp.pack(x, u)).cwiseAbs().maxCoeff();
  };
  const double d16 = defect(16);
  const double d32 = defect(32);
  const double d64 = defect(64);
  CHECK(d32 / d16 >= 0.35);
  CHECK(d32 / d16 <= 0.65);
  CHECK(d64 / d32 >= 0.35);
  CHECK(d64 / d32 <= 0.65);
}

TEST_CASE("defects at the bang-bang exact solution decay with N") {
  const Example2Exact exact;
  const ocp::OcpProblem& p = builtin_example(2).problem;
  auto max_defect = [&](int N) {
    const TranscribedNlp nlp = transcribe(p, N);
    MatrixXd x(1, N + 1), u(1, N + 1);
    for (int j = 0; j <= N; ++j) {
      const double t = 2.0 * j / N;
      x(0, j) = exact.y(t);
      u(0, j) = exact.u(t);
    }
    return nlp.eq_constraints(nlp.pack(x, u)).cwiseAbs().maxCoeff();
  };
  const double d15 = max_defect(15);
  const double d30 = max_defect(30);
  const double d60 = max_defect(60);
  CHECK(d30 < d15);
  CHECK(d60 < d30);
  // Estimate C from the N=30 run; allow slack for the kink at the switch.
  const double c_est = 30.0 * d30;
  CHECK(d60 <= 1.5 * c_est / 60.0);
}

TEST_CASE("analytic jacobians agree with finite differences") {
  const ocp::ProblemBundle bundle = ocp::builtin_example(1);
  const int N = 6;
  const TranscribedNlp nlp = transcribe(bundle.problem, N);
  REQUIRE(nlp.has_derivatives());
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    VectorXd z(nlp.num_vars());
    for (int i = 0; i < z.size(); ++i) z[i] = testsupport::uniform(rng, 0.5, 3.0);
    const VectorXd g = nlp.objective_gradient(z);
    const VectorXd g_fd = solver::fd_gradient(
        [&nlp](const VectorXd& v) { return nlp.objective(v); }, z);
    CHECK((g - g_fd).lpNorm<Eigen::Infinity>() <= 1e-5);

    const MatrixXd J = nlp.eq_jacobian(z);
    for (int col = 0; col < 3; ++col) {
      const int i = static_cast<int>(rng() % z.size());
      const double h = 1e-6 * std::max(1.0, std::abs(z[i]));
      VectorXd zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      const VectorXd fd = (nlp.eq_constraints(zp) - nlp.eq_constraints(zm)) / (2 * h);
      CHECK((J.col(i) - fd).lpNorm<Eigen::Infinity>() <= 1e-5);
    }
  }
}

TEST_CASE("relaxed mode moves defects into two-sided inequality rows") {
  const ocp::OcpProblem& p = builtin_example(2).problem;
  TranscribeOptions opts;
  opts.delta_mode = DeltaMode::corollary;
  opts.c_p = 2.0;
  const int N = 8;
  const TranscribedNlp nlp = transcribe(p, N, opts);
  CHECK(nlp.delta_p() == doctest::Approx(0.25));
  CHECK(nlp.rows().eq_defect_begin == -1);
  CHECK(nlp.rows().ineq_defect_upper_begin >= 0);
  CHECK(nlp.num_eq() == 2);  // boundary rows only

  // A point with defect d has rows d - delta and -d - delta.
  MatrixXd x(1, N + 1), u(1, N + 1);
  x.setConstant(1.0);
  u.setConstant(0.5);  // defect = 0 - (1 + 0.5) = -1.5
  const VectorXd c = nlp.ineq_constraints(nlp.pack(x, u));
  CHECK(c[nlp.rows().ineq_defect_upper_begin] == doctest::Approx(-1.5 - 0.25));
  CHECK(c[nlp.rows().ineq_defect_lower_begin] == doctest::Approx(1.5 - 0.25));
  // path rows are relaxed by delta
  const double u_row = c[nlp.rows().ineq_path_begin];  // u - 2 - delta
  CHECK(u_row == doctest::Approx(0.5 - 2.0 - 0.25));
}

TEST_CASE("attach_structured: satisfied margins for well separated constants") {
  // Two constant 2D curves 100 apart, clearance 50, temporal mode.
  ocp::OcpProblem p;
  p.n_x = 4;
  p.n_u = 0;
  p.n_e = 0;
  p.n_h = 0;
  p.horizon = ocp::FixedHorizon{0.0, 1.0};
  p.dynamics = [](const VectorXd&, const VectorXd&) { return VectorXd::Zero(4); };
  p.dynamics_jac_x = [](const VectorXd&, const VectorXd&) { return MatrixXd::Zero(4, 4); };
  p.dynamics_jac_u = [](const VectorXd&, const VectorXd&) { return MatrixXd::Zero(4, 0); };
  const int N = 4;
  const TranscribedNlp base = transcribe(p, N);

  ocp::MinSeparationPairwise sep;
  sep.label = "pair";
  sep.indices_a = {0, 1};
  sep.indices_b = {2, 3};
  sep.clearance = 50.0;
  sep.mode = ocp::SeparationMode::temporal;
  const TranscribedNlp nlp = attach_structured(base, {sep}, true);
  CHECK(nlp.has_pure_state_rows());

  MatrixXd x(4, N + 1), u(0, N + 1);
  x.setZero();
  x.row(2).setConstant(100.0);  // second curve at (100, 0)
  const VectorXd c = nlp.ineq_constraints(nlp.pack(x, u));
  // certified row is last: clearance - certified distance = 50 - 100
  CHECK(c[nlp.num_ineq() - 1] == doctest::Approx(-50.0).epsilon(1e-6));
  CHECK(c.maxCoeff() <= 0.0);  // all rows satisfied
}

TEST_CASE("attach_structured: norm band certificates on a constant control") {
  ocp::OcpProblem p = integrator_1d();
  p.n_x = 2;
  p.n_u = 2;
  p.dynamics = [](const VectorXd&, const VectorXd& u) { return u; };
  p.dynamics_jac_x = [](const VectorXd&, const VectorXd&) { return MatrixXd::Zero(2, 2); };
  p.dynamics_jac_u = [](const VectorXd&, const VectorXd&) {
    return MatrixXd::Identity(2, 2);
  };
  const int N = 3;
  ocp::NormBand band;
  band.label = "band";
  band.control_indices = {0, 1};
  band.lower = 15.0;
  band.upper = 32.0;
  const TranscribedNlp nlp = attach_structured(transcribe(p, N), {band}, true);
  CHECK_FALSE(nlp.has_pure_state_rows());

  MatrixXd x = MatrixXd::Zero(2, N + 1);
  MatrixXd u(2, N + 1);
  u.row(0).setConstant(20.0);
  u.row(1).setConstant(0.0);
  const VectorXd z = nlp.pack(x, u);

  // ||u||^2 is constant 400: both certified rows satisfied.
  const VectorXd c = nlp.ineq_constraints(z);
  CHECK(c[nlp.num_ineq() - 2] <= 0.0);
  CHECK(c[nlp.num_ineq() - 1] <= 0.0);

  BernsteinPoly usq(u.row(0), 0.0, 1.0);
  const auto ex = geometry::scalar_extrema(
      poly_sum(poly_product(usq, usq),
               poly_product(BernsteinPoly(u.row(1), 0.0, 1.0),
                            BernsteinPoly(u.row(1), 0.0, 1.0))),
      1e-9);
  CHECK(ex.min_value == doctest::Approx(400.0).epsilon(1e-9));
  CHECK(ex.max_value == doctest::Approx(400.0).epsilon(1e-9));
}

TEST_CASE("free final time: bound rows and tf-scaled defects") {
  const ocp::ProblemBundle bundle = ocp::builtin_example(3);
  const int N = 5;
  const TranscribedNlp nlp = transcribe_bundle(bundle, TranscribeOptions{N});
  REQUIRE(nlp.layout().tf_offset >= 0);

  // A straight line traversed at constant speed is dynamically exact.
  MatrixXd x(2, N + 1), u(2, N + 1);
  const Eigen::Vector2d a(-500, -900), b(1500, -600);
  const double tf = 90.0;
  for (int j = 0; j <= N; ++j) {
    const double s = static_cast<double>(j) / N;
    x.col(j) = a + s * (b - a);
    u.col(j) = (b - a) / tf;
  }
  const VectorXd z = nlp.pack(x, u, tf);
  const VectorXd c_eq = nlp.eq_constraints(z);
  CHECK(c_eq.head(2 * (N + 1)).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(nlp.objective(z) == doctest::Approx(tf));
  CHECK(nlp.final_time(z) == tf);

  const VectorXd c = nlp.ineq_constraints(z);
  CHECK(c[nlp.rows().ineq_tf_begin] == doctest::Approx(20.0 - tf));
  CHECK(c[nlp.rows().ineq_tf_begin + 1] == doctest::Approx(tf - 300.0));

  const BernsteinPoly sp = nlp.state_poly(z);
  CHECK(sp.t1() == doctest::Approx(tf));
  CHECK((sp.eval(0.0) - a).norm() <= 1e-12);
}

TEST_CASE("transcribe rejects invalid input") {
  CHECK_THROWS_AS(transcribe(builtin_example(1).problem, 0), ArgumentError);
  ocp::OcpProblem bad = integrator_1d();
  bad.dynamics = nullptr;
  CHECK_THROWS_AS(transcribe(bad, 5), ArgumentError);
}

TEST_SUITE_END();
