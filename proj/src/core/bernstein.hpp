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
#include <utility>
#include <vector>

#include "core/errors.hpp"

namespace bernopt {

/// Value of the Bernstein basis polynomial b_{j,N}(s) = C(N,j) s^j (1-s)^{N-j}.
///
/// Computed with a multiplicative recurrence (no integer factorials), stable
/// for N up to a few hundred. `s` is usually in [0,1] but any finite value is
/// accepted. Throws ArgumentError if j is outside 0..N.
double basis_eval(int j, int N, double s);

/// All basis values b_{0,N}(s) .. b_{N,N}(s) in one pass (degree-raising
/// recurrence, O(N^2), numerically stable on [0,1]).
Eigen::VectorXd basis_row(int N, double s);

/// Binomial coefficient C(n,k) as a double (multiplicative recurrence).
double binomial(int n, int k);

/// Result of an evaluation that may have happened outside the domain.
struct EvalPoint {
  Eigen::VectorXd value;
  bool extrapolated = false;
};

/// A vector-valued polynomial in Bernstein form on an interval [t0, t1].
///
/// Coefficients are stored as an n x (N+1) matrix; column j is the j-th
/// Bernstein coefficient (control point). The curve starts at column 0 and
/// ends at column N, and lies inside the convex hull of the columns for
/// t in [t0, t1]. All operations are pure; instances are immutable and safe
/// to share across threads.
class BernsteinPoly {
public:
  /// Wraps a coefficient matrix. Throws on empty/non-finite coefficients or
  /// a degenerate interval.
  BernsteinPoly(Eigen::MatrixXd coeffs, double t0, double t1);

  /// Constant polynomial of the requested degree.
  static BernsteinPoly constant(const Eigen::VectorXd& value, double t0, double t1,
                                int degree = 0);

  /// Bernstein approximation: the columns of `samples` are function values at
  /// the equidistant nodes t_j = t0 + (j/N)(t1-t0) and become the coefficients
  /// verbatim. The resulting polynomial interpolates only the endpoints.
  static BernsteinPoly approximate(Eigen::MatrixXd samples, double t0, double t1);

  /// Convenience overload sampling `fn` at the nodes.
  static BernsteinPoly approximate(const std::function<Eigen::VectorXd(double)>& fn,
                                   int dim, int degree, double t0, double t1);

  int dim() const { return static_cast<int>(coeffs_.rows()); }
  int degree() const { return static_cast<int>(coeffs_.cols()) - 1; }
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  double width() const { return t1_ - t0_; }
  const Eigen::MatrixXd& coeffs() const { return coeffs_; }
  bool contains(double t) const { return t >= t0_ && t <= t1_; }

  /// de Casteljau evaluation. Defined for all finite t; values outside
  /// [t0, t1] are extrapolations (see eval_at) and carry no hull guarantees.
  Eigen::VectorXd eval(double t) const;

  /// Evaluation that flags extrapolation.
  EvalPoint eval_at(double t) const;

  /// Direct basis-sum evaluation; used as the independent route in tests and
  /// for assembling node matrices.
  Eigen::VectorXd eval_basis_sum(double t) const;

  /// Derivative as a Bernstein polynomial of degree N-1 on the same interval
  /// (coefficients N (c_{j+1}-c_j) / (t1-t0)). The derivative of a constant
  /// is the degree-0 zero polynomial.
  BernsteinPoly derivative() const;

  /// Exact integral over [t0, t1]: (t1-t0)/(N+1) * sum of coefficients.
  Eigen::VectorXd integral() const;

  /// Splits at t_div in (t0, t1) with the de Casteljau triangle. Both pieces
  /// have degree N; domains are [t0, t_div] and [t_div, t1].
  std::pair<BernsteinPoly, BernsteinPoly> subdivide(double t_div) const;

  /// Same polynomial re-expressed at a higher degree M >= N.
  BernsteinPoly elevated(int target_degree) const;

  /// Single scalar component as its own polynomial.
  BernsteinPoly component(int row) const;

  /// Sub-vector of components, in the order given.
  BernsteinPoly select(const std::vector<int>& rows) const;

private:
  Eigen::MatrixXd coeffs_;
  double t0_;
  double t1_;
};

/// Sum of two polynomials on the same interval with equal dimension; degrees
/// are matched by elevation.
BernsteinPoly poly_sum(const BernsteinPoly& a, const BernsteinPoly& b);

/// Product of two scalar polynomials on the same interval; exact coefficients
/// of degree Na+Nb via the binomial-weighted convolution.
BernsteinPoly poly_product(const BernsteinPoly& a, const BernsteinPoly& b);

/// The equidistant node grid used by the transcription and the quadrature
/// rule: t_j = t0 + (j/N)(t1-t0), weight w = (t1-t0)/(N+1).
struct NodeGrid {
  int degree;
  double t0;
  double t1;

  NodeGrid(int degree_, double t0_, double t1_);

  double node(int j) const;
  std::vector<double> nodes() const;
  double weight() const { return (t1 - t0) / (degree + 1); }
};

/// Node-sum quadrature: w * sum_j samples(:,j). Exact for polynomials
/// expressed in Bernstein form on the grid's interval.
Eigen::VectorXd quadrature(const Eigen::MatrixXd& samples_at_nodes, double weight);

}  // namespace bernopt
