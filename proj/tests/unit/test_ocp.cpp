#include <doctest.h>

#include <cmath>

#include "ocp/examples.hpp"
#include "ocp/json_config.hpp"
#include "ocp/problem.hpp"

using namespace bernopt::ocp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

OcpProblem double_integrator() {
  OcpProblem p;
  p.name = "double_integrator";
  p.n_x = 2;
  p.n_u = 1;
  p.n_e = 2;
  p.n_h = 1;
  p.horizon = FixedHorizon{0.0, 1.0};
  p.running_cost = [](const VectorXd&, const VectorXd& u) { return 0.5 * u.squaredNorm(); };
  p.dynamics = [](const VectorXd& x, const VectorXd& u) {
    VectorXd f(2);
    f << x[1], u[0];
    return f;
  };
  p.boundary = [](const VectorXd& x0, const VectorXd&) { return x0; };
  p.path = [](const VectorXd&, const VectorXd& u) {
    return VectorXd::Constant(1, u[0] - 10.0);
  };
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("ocp");

TEST_CASE("validate passes a consistent problem") {
  const ValidationReport report = validate(double_integrator());
  CHECK(report.ok());
}

TEST_CASE("validate flags dimension and finiteness defects") {
  OcpProblem wrong_h = double_integrator();
  wrong_h.path = [](const VectorXd&, const VectorXd&) { return VectorXd::Zero(3); };
  const ValidationReport r1 = validate(wrong_h);
  REQUIRE_FALSE(r1.ok());
  CHECK(r1.violations.front().find("path constraint dimension") != std::string::npos);

  OcpProblem nan_f = double_integrator();
  nan_f.dynamics = [](const VectorXd&, const VectorXd&) {
    return VectorXd::Constant(2, std::nan(""));
  };
  const ValidationReport r2 = validate(nan_f);
  REQUIRE_FALSE(r2.ok());
  CHECK(r2.violations.front().find("non-finite dynamics") != std::string::npos);

  OcpProblem no_dyn = double_integrator();
  no_dyn.dynamics = nullptr;
  CHECK_FALSE(validate(no_dyn).ok());
}

TEST_CASE("example 1 matches its published data") {
  const ProblemBundle bundle = builtin_example(1);
  const OcpProblem& p = bundle.problem;
  CHECK(p.n_x == 1);
  CHECK_FALSE(p.terminal_cost);  // E = 0

  const VectorXd y = VectorXd::Constant(1, 2.0);
  const VectorXd u = VectorXd::Zero(1);
  CHECK(p.dynamics(y, u)[0] == doctest::Approx(4.0));  // 2y at u = 0

  const VectorXd e = p.boundary(VectorXd::Constant(1, 2.0), VectorXd::Constant(1, 1.0));
  CHECK(e.norm() == doctest::Approx(0.0));
  CHECK(p.running_cost(y, VectorXd::Constant(1, 3.0)) ==
        doctest::Approx(0.5 * (2.0 + 9.0)));
  CHECK(std::get<FixedHorizon>(p.horizon).t1 == 5.0);
  CHECK(validate(bundle).ok());
}

TEST_CASE("example 1 dynamics stays total below zero state") {
  const ProblemBundle bundle = builtin_example(1);
  const VectorXd y = VectorXd::Constant(1, -3.0);
  const VectorXd u = VectorXd::Constant(1, 1.0);
  CHECK(std::isfinite(bundle.problem.dynamics(y, u)[0]));
}

TEST_CASE("example 2 matches its published data") {
  const ProblemBundle bundle = builtin_example(2);
  const OcpProblem& p = bundle.problem;
  const VectorXd e =
      p.boundary(VectorXd::Constant(1, 4.0), VectorXd::Constant(1, 39.392));
  CHECK(e.norm() == doctest::Approx(0.0));
  // control band rows: u - 2 <= 0 and -u <= 0
  const VectorXd h = p.path(VectorXd::Zero(1), VectorXd::Constant(1, 2.5));
  CHECK(h[0] == doctest::Approx(0.5));
  CHECK(h[1] == doctest::Approx(-2.5));
  CHECK(validate(bundle).ok());
}

TEST_CASE("example 3 carries three separation constraints and a speed band") {
  const ProblemBundle bundle = builtin_example(3);
  CHECK(bundle.problem.has_free_final_time());
  CHECK(bundle.problem.tf_cost_weight == 1.0);
  int separations = 0;
  int bands = 0;
  for (const auto& c : bundle.constraints) {
    if (const auto* sep = std::get_if<MinSeparationFromPoint>(&c)) {
      CHECK(sep->clearance == 50.0);
      ++separations;
    } else if (const auto* band = std::get_if<NormBand>(&c)) {
      CHECK(band->lower == 15.0);
      CHECK(band->upper == 32.0);
      ++bands;
    }
  }
  CHECK(separations == 3);
  CHECK(bands == 1);
  CHECK(validate(bundle).ok());
}

TEST_CASE("example 4 builds a fleet with pairwise separation") {
  ExampleOptions opts;
  opts.fleet_size = 4;
  const ProblemBundle bundle = builtin_example(4, opts);
  CHECK(bundle.problem.n_x == 12);
  CHECK(bundle.problem.n_u == 8);
  int pairwise = 0;
  for (const auto& c : bundle.constraints) {
    if (std::holds_alternative<MinSeparationPairwise>(c)) ++pairwise;
  }
  CHECK(pairwise == 6);  // C(4,2)
  CHECK(validate(bundle).ok());

  // Dubins rates at heading 0: xdot = V, ydot = 0, psidot = omega.
  VectorXd x = bundle.problem.x0_hint;
  VectorXd u = VectorXd::Zero(8);
  u[0] = 20.0;
  u[1] = 0.1;
  const VectorXd f = bundle.problem.dynamics(x, u);
  CHECK(f[0] == doctest::Approx(20.0));
  CHECK(f[1] == doctest::Approx(0.0));
  CHECK(f[2] == doctest::Approx(0.1));

  CHECK_THROWS_AS(builtin_example(4, ExampleOptions{12}), bernopt::ArgumentError);
  CHECK_THROWS_AS(builtin_example(7), bernopt::ArgumentError);
}

TEST_CASE("json config builds problems and rejects unknown keys") {
  const std::string good = R"({
    "family": "single_integrator",
    "horizon": {"type": "free", "t0": 0.0, "tf_min": 10.0, "tf_max": 100.0},
    "start": [0.0, 0.0],
    "goal": [100.0, 0.0],
    "obstacles": [{"center": [50.0, 5.0], "clearance": 10.0}],
    "speed_band": [1.0, 5.0]
  })";
  const ProblemBundle bundle = problem_from_json(good);
  CHECK(bundle.problem.n_x == 2);
  CHECK(bundle.constraints.size() == 2);  // obstacle + speed band
  CHECK(validate(bundle).ok());

  const std::string bad = R"({
    "family": "single_integrator",
    "horizon": {"type": "free", "tf_min": 10.0, "tf_max": 100.0},
    "start": [0.0, 0.0],
    "goal": [100.0, 0.0],
    "speed_band": [1.0, 5.0],
    "extra_key": 1
  })";
  CHECK_THROWS_AS(problem_from_json(bad), bernopt::ArgumentError);

  const std::string fleet = R"({
    "family": "dubins_fleet",
    "horizon": {"type": "free", "tf_min": 10.0, "tf_max": 200.0},
    "vehicles": [
      {"start": [0.0, 0.0, 0.0], "goal": [500.0, 0.0]},
      {"start": [0.0, 200.0, 0.0], "goal": [500.0, 200.0]}
    ],
    "speed_band": [15.0, 32.0],
    "max_turn_rate": 0.3,
    "separation": 50.0,
    "separation_mode": "temporal"
  })";
  const ProblemBundle fb = problem_from_json(fleet);
  CHECK(fb.problem.n_x == 6);
  CHECK(validate(fb).ok());

  CHECK_THROWS_AS(problem_from_json("{\"family\": \"unknown\"}"), bernopt::ArgumentError);
  CHECK_THROWS_AS(problem_from_json("not json"), bernopt::ArgumentError);
}

TEST_SUITE_END();
