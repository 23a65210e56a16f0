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

#include "core/bernstein.hpp"

#include <cmath>
#include <sstream>

namespace bernopt {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r *= static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

double basis_eval(int j, int N, double s) {
  if (N < 0 || j < 0 || j > N) {
    std::ostringstream oss;
    oss << "basis_eval: index j=" << j << " out of range for degree N=" << N;
    throw ArgumentError(oss.str());
  }
  // Exact endpoint values (0^0 == 1 by convention).
  if (s == 0.0) return j == 0 ? 1.0 : 0.0;
  if (s == 1.0) return j == N ? 1.0 : 0.0;
  // Interleave the binomial factors with powers of s so intermediate values
  // stay far from overflow for N up to a few hundred.
  double b = 1.0;
  for (int i = 1; i <= j; ++i) {
    b *= static_cast<double>(N - j + i) / static_cast<double>(i) * s;
  }
  return b * std::pow(1.0 - s, N - j);
}

Eigen::VectorXd basis_row(int N, double s) {
  if (N < 0) throw ArgumentError("basis_row: negative degree");
  Eigen::VectorXd row = Eigen::VectorXd::Zero(N + 1);
  row[0] = 1.0;
  const double c = 1.0 - s;
  for (int n = 1; n <= N; ++n) {
    row[n] = s * row[n - 1];
    for (int k = n - 1; k >= 1; --k) {
      row[k] = s * row[k - 1] + c * row[k];
    }
    row[0] *= c;
  }
  return row;
}

BernsteinPoly::BernsteinPoly(Eigen::MatrixXd coeffs, double t0, double t1)
    : coeffs_(std::move(coeffs)), t0_(t0), t1_(t1) {
  if (coeffs_.rows() < 1 || coeffs_.cols() < 1) {
    throw DimensionError("BernsteinPoly: coefficient matrix must be non-empty");
  }
  if (!coeffs_.allFinite()) {
    throw ArgumentError("BernsteinPoly: non-finite coefficient");
  }
  if (!std::isfinite(t0_) || !std::isfinite(t1_) || !(t1_ > t0_)) {
    throw ArgumentError("BernsteinPoly: domain must satisfy t0 < t1 and be finite");
  }
}

BernsteinPoly BernsteinPoly::constant(const Eigen::VectorXd& value, double t0, double t1,
                                      int degree) {
  if (degree < 0) throw ArgumentError("BernsteinPoly::constant: negative degree");
  Eigen::MatrixXd c(value.size(), degree + 1);
  for (int j = 0; j <= degree; ++j) c.col(j) = value;
  return BernsteinPoly(std::move(c), t0, t1);
}

BernsteinPoly BernsteinPoly::approximate(Eigen::MatrixXd samples, double t0, double t1) {
  // Eq.-(3)-style operator: the node samples are the coefficients.
  return BernsteinPoly(std::move(samples), t0, t1);
}

BernsteinPoly BernsteinPoly::approximate(const std::function<Eigen::VectorXd(double)>& fn,
                                         int dim, int degree, double t0, double t1) {
  if (degree < 0) throw ArgumentError("approximate: negative degree");
  Eigen::MatrixXd samples(dim, degree + 1);
  if (degree == 0) {
    samples.col(0) = fn(t0);
  } else {
    NodeGrid grid(degree, t0, t1);
    for (int j = 0; j <= degree; ++j) samples.col(j) = fn(grid.node(j));
  }
  return BernsteinPoly(std::move(samples), t0, t1);
}

Eigen::VectorXd BernsteinPoly::eval(double t) const {
  const int N = degree();
  const double s = (t - t0_) / (t1_ - t0_);
  Eigen::MatrixXd work = coeffs_;
  for (int level = 1; level <= N; ++level) {
    for (int i = 0; i <= N - level; ++i) {
      work.col(i) = (1.0 - s) * work.col(i) + s * work.col(i + 1);
    }
  }
  return work.col(0);
}

EvalPoint BernsteinPoly::eval_at(double t) const {
  return EvalPoint{eval(t), !contains(t)};
}

Eigen::VectorXd BernsteinPoly::eval_basis_sum(double t) const {
  const double s = (t - t0_) / (t1_ - t0_);
  return coeffs_ * basis_row(degree(), s);
}

BernsteinPoly BernsteinPoly::derivative() const {
  const int N = degree();
  if (N == 0) {
    return BernsteinPoly(Eigen::MatrixXd::Zero(dim(), 1), t0_, t1_);
  }
  Eigen::MatrixXd d(dim(), N);
  const double scale = static_cast<double>(N) / (t1_ - t0_);
  for (int j = 0; j < N; ++j) {
    d.col(j) = scale * (coeffs_.col(j + 1) - coeffs_.col(j));
  }
  return BernsteinPoly(std::move(d), t0_, t1_);
}

Eigen::VectorXd BernsteinPoly::integral() const {
  const double w = (t1_ - t0_) / (degree() + 1);
  return w * coeffs_.rowwise().sum();
}

std::pair<BernsteinPoly, BernsteinPoly> BernsteinPoly::subdivide(double t_div) const {
  if (!(t_div > t0_ && t_div < t1_)) {
    throw ArgumentError("subdivide: split point must lie strictly inside the domain");
  }
  const int N = degree();
  const double s = (t_div - t0_) / (t1_ - t0_);
  Eigen::MatrixXd work = coeffs_;
  Eigen::MatrixXd left(dim(), N + 1);
  Eigen::MatrixXd right(dim(), N + 1);
  left.col(0) = work.col(0);
  right.col(N) = work.col(N);
  for (int level = 1; level <= N; ++level) {
    for (int i = 0; i <= N - level; ++i) {
      work.col(i) = (1.0 - s) * work.col(i) + s * work.col(i + 1);
    }
    left.col(level) = work.col(0);
    right.col(N - level) = work.col(N - level);
  }
  return {BernsteinPoly(std::move(left), t0_, t_div),
          BernsteinPoly(std::move(right), t_div, t1_)};
}

BernsteinPoly BernsteinPoly::elevated(int target_degree) const {
  const int N = degree();
  if (target_degree < N) {
    throw ArgumentError("elevated: target degree below current degree");
  }
  Eigen::MatrixXd c = coeffs_;
  for (int m = N; m < target_degree; ++m) {
    Eigen::MatrixXd up(dim(), m + 2);
    up.col(0) = c.col(0);
    up.col(m + 1) = c.col(m);
    for (int k = 1; k <= m; ++k) {
      const double a = static_cast<double>(k) / (m + 1);
      up.col(k) = a * c.col(k - 1) + (1.0 - a) * c.col(k);
    }
    c = std::move(up);
  }
  return BernsteinPoly(std::move(c), t0_, t1_);
}

BernsteinPoly BernsteinPoly::component(int row) const {
  if (row < 0 || row >= dim()) throw ArgumentError("component: row out of range");
  return BernsteinPoly(coeffs_.row(row), t0_, t1_);
}

BernsteinPoly BernsteinPoly::select(const std::vector<int>& rows) const {
  if (rows.empty()) throw ArgumentError("select: empty row list");
  Eigen::MatrixXd c(static_cast<int>(rows.size()), degree() + 1);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= dim()) throw ArgumentError("select: row out of range");
    c.row(static_cast<int>(i)) = coeffs_.row(rows[i]);
  }
  return BernsteinPoly(std::move(c), t0_, t1_);
}

BernsteinPoly poly_sum(const BernsteinPoly& a, const BernsteinPoly& b) {
  if (a.dim() != b.dim()) throw DimensionError("poly_sum: dimension mismatch");
  if (a.t0() != b.t0() || a.t1() != b.t1()) throw ArgumentError("poly_sum: domain mismatch");
  const int M = std::max(a.degree(), b.degree());
  const BernsteinPoly ae = a.elevated(M);
  const BernsteinPoly be = b.elevated(M);
  return BernsteinPoly(ae.coeffs() + be.coeffs(), a.t0(), a.t1());
}

BernsteinPoly poly_product(const BernsteinPoly& a, const BernsteinPoly& b) {
  if (a.dim() != 1 || b.dim() != 1) {
    throw DimensionError("poly_product: factors must be scalar polynomials");
  }
  if (a.t0() != b.t0() || a.t1() != b.t1()) {
    throw ArgumentError("poly_product: domain mismatch");
  }
  const int Na = a.degree();
  const int Nb = b.degree();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, Na + Nb + 1);
  for (int k = 0; k <= Na + Nb; ++k) {
    const double denom = binomial(Na + Nb, k);
    double acc = 0.0;
    const int lo = std::max(0, k - Nb);
    const int hi = std::min(Na, k);
    for (int j = lo; j <= hi; ++j) {
      acc += binomial(Na, j) * binomial(Nb, k - j) / denom * a.coeffs()(0, j) *
             b.coeffs()(0, k - j);
    }
    c(0, k) = acc;
  }
  return BernsteinPoly(std::move(c), a.t0(), a.t1());
}

NodeGrid::NodeGrid(int degree_, double t0_, double t1_) : degree(degree_), t0(t0_), t1(t1_) {
  if (degree < 1) throw ArgumentError("NodeGrid: degree must be >= 1");
  if (!(t1 > t0)) throw ArgumentError("NodeGrid: t1 must exceed t0");
}

double NodeGrid::node(int j) const {
  if (j < 0 || j > degree) throw ArgumentError("NodeGrid: node index out of range");
  if (j == 0) return t0;
  if (j == degree) return t1;
  return t0 + (static_cast<double>(j) / degree) * (t1 - t0);
}

std::vector<double> NodeGrid::nodes() const {
  std::vector<double> ts(degree + 1);
  for (int j = 0; j <= degree; ++j) ts[j] = node(j);
  return ts;
}

Eigen::VectorXd quadrature(const Eigen::MatrixXd& samples_at_nodes, double weight) {
  return weight * samples_at_nodes.rowwise().sum();
}

}  // namespace bernopt
