// Test-only reference computations, kept independent of the library paths
// they check.
#pragma once

#include <Eigen/Core>
#include <random>

#include "core/bernstein.hpp"

namespace testsupport {

// Distance between conv(A) and conv(B) by exhaustive enumeration of support
// subsets (size <= d+1 per side) with a bordered least-squares solve per
// pair. Exponential in the point counts; use small clouds.
double exhaustive_hull_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Dense-grid minimum of ||p(ta) - q(tb)|| over an na x nb parameter grid.
double grid_min_distance(const bernopt::BernsteinPoly& p, const bernopt::BernsteinPoly& q,
                         int na, int nb, double* arg_a = nullptr, double* arg_b = nullptr);

// Dense-grid minimum of ||p(t) - point||.
double grid_min_point_distance(const bernopt::BernsteinPoly& p,
                               const Eigen::VectorXd& point, int n);

// A Lipschitz bound on ||p'(t)|| from the derivative control polygon.
double speed_bound(const bernopt::BernsteinPoly& p);

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Random vector-valued Bernstein polynomial with coefficients in [lo, hi].
bernopt::BernsteinPoly random_poly(std::mt19937& rng, int dim, int degree, double t0,
                                   double t1, double lo = -1.0, double hi = 1.0);

}  // namespace testsupport
