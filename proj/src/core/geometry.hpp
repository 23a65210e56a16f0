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

#include "core/bernstein.hpp"
#include "core/errors.hpp"

namespace bernopt::geometry {

/// A finite set of d-vectors interpreted as the convex hull of its points.
struct PointCloud {
  Eigen::MatrixXd points;  // d x m, one point per column

  explicit PointCloud(Eigen::MatrixXd pts);
  static PointCloud single(const Eigen::VectorXd& p);

  int dim() const { return static_cast<int>(points.rows()); }
  int size() const { return static_cast<int>(points.cols()); }
};

struct GjkResult {
  double distance = 0.0;     // ||witness_a - witness_b||
  double lower_bound = 0.0;  // certified lower bound on the hull distance
  Eigen::VectorXd witness_a;
  Eigen::VectorXd witness_b;
  int iterations = 0;
};

struct GjkOptions {
  double tolerance = 1e-12;  // absolute duality-gap target
  int max_iterations = 200;
};

/// Distance between conv(A) and conv(B) via the Gilbert-Johnson-Keerthi
/// iteration with exhaustive sub-simplex projection (works in any dimension).
/// Returns 0 when the hulls intersect. Throws NumericalError when the
/// iteration cap is hit before the duality gap closes; the message carries
/// the best bracket.
GjkResult gjk_distance(const PointCloud& a, const PointCloud& b,
                       const GjkOptions& opts = {});

/// Certified bracket on a minimum distance, plus the parameters realizing
/// the upper value.
struct DistanceResult {
  double lower = 0.0;
  double upper = 0.0;
  double t_a = 0.0;
  double t_b = 0.0;
  long iterations = 0;  // branch-and-bound nodes processed
};

/// Raised when the subdivision budget is exhausted; `best` holds the bracket
/// reached so far.
class DistanceBudgetError : public NumericalError {
public:
  DistanceBudgetError(const std::string& what, DistanceResult best_)
      : NumericalError(what), best(best_) {}
  DistanceResult best;
};

/// min over (t_a, t_b) of ||p(t_a) - q(t_b)||, parameters living on each
/// curve's own domain. Best-first branch-and-bound: lower bounds from GJK on
/// control-point clouds (convex-hull property), upper bounds from evaluated
/// candidates, subdivision of the least-bound piece until upper - lower <=
/// tol. Ties are broken by node creation order, so results are deterministic.
DistanceResult curve_min_distance(const BernsteinPoly& p, const BernsteinPoly& q,
                                  double tol, long node_budget = 100000);

/// min over t of ||p(t) - point||; same scheme with a one-point second hull.
DistanceResult curve_point_distance(const BernsteinPoly& p, const Eigen::VectorXd& point,
                                    double tol, long node_budget = 100000);

/// Certified extrema of a scalar polynomial. min_value / max_value are
/// attained values (within tol of the true extrema); min_lower / max_upper
/// are the certified outer bounds used when a constraint must be sound.
struct ScalarExtrema {
  double min_value = 0.0;
  double max_value = 0.0;
  double argmin = 0.0;
  double argmax = 0.0;
  double min_lower = 0.0;
  double max_upper = 0.0;
  long iterations = 0;
};

class ExtremaBudgetError : public NumericalError {
public:
  ExtremaBudgetError(const std::string& what, ScalarExtrema best_)
      : NumericalError(what), best(best_) {}
  ScalarExtrema best;
};

/// Branch-and-bound on the coefficient range bound (min coeff <= p(t) <= max
/// coeff on the domain).
ScalarExtrema scalar_extrema(const BernsteinPoly& p, double tol,
                             long node_budget = 100000);

}  // namespace bernopt::geometry
