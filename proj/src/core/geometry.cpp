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

#include "core/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace bernopt::geometry {

PointCloud::PointCloud(Eigen::MatrixXd pts) : points(std::move(pts)) {
  if (points.cols() < 1 || points.rows() < 1) {
    throw ArgumentError("PointCloud: must contain at least one point");
  }
  if (!points.allFinite()) {
    throw ArgumentError("PointCloud: non-finite coordinate");
  }
}

PointCloud PointCloud::single(const Eigen::VectorXd& p) {
  Eigen::MatrixXd m(p.size(), 1);
  m.col(0) = p;
  return PointCloud(std::move(m));
}

namespace {

int support_index(const Eigen::MatrixXd& pts, const Eigen::VectorXd& dir) {
  int best = 0;
  double best_dot = pts.col(0).dot(dir);
  for (int i = 1; i < pts.cols(); ++i) {
    const double d = pts.col(i).dot(dir);
    if (d > best_dot) {
      best_dot = d;
      best = i;
    }
  }
  return best;
}

struct SimplexVertex {
  Eigen::VectorXd w;  // a - b
  int ia = 0;
  int ib = 0;
};

// Projection of the origin onto conv(simplex): enumerate support subsets of
// size <= d+1, solve the bordered Gram system for barycentric coordinates,
// keep the best all-nonnegative candidate, and shrink the simplex to that
// subset. Exhaustive, so degenerate (affinely dependent) simplices are
// handled without a special path.
bool project_origin(std::vector<SimplexVertex>& simplex, Eigen::VectorXd& v,
                    Eigen::VectorXd& bary) {
  const int m = static_cast<int>(simplex.size());
  const int d = static_cast<int>(simplex[0].w.size());
  const int max_card = std::min(m, d + 1);

  double best_norm2 = std::numeric_limits<double>::infinity();
  int best_mask = 0;
  Eigen::VectorXd best_alpha;

  for (int mask = 1; mask < (1 << m); ++mask) {
    const int card = __builtin_popcount(static_cast<unsigned>(mask));
    if (card > max_card) continue;
    std::vector<int> idx;
    idx.reserve(card);
    for (int i = 0; i < m; ++i) {
      if (mask & (1 << i)) idx.push_back(i);
    }
    Eigen::MatrixXd W(d, card);
    for (int i = 0; i < card; ++i) W.col(i) = simplex[idx[i]].w;

    Eigen::VectorXd alpha(card);
    if (card == 1) {
      alpha[0] = 1.0;
    } else {
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(card + 1, card + 1);
      K.topLeftCorner(card, card) = W.transpose() * W;
      K.topRightCorner(card, 1).setOnes();
      K.bottomLeftCorner(1, card).setOnes();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(card + 1);
      rhs[card] = 1.0;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
      if (!lu.isInvertible()) continue;  // affinely dependent subset
      alpha = lu.solve(rhs).head(card);
    }
    if ((alpha.array() < -1e-12).any()) continue;

    const Eigen::VectorXd cand = W * alpha;
    const double n2 = cand.squaredNorm();
    if (n2 < best_norm2 - 1e-30 ||
        (n2 <= best_norm2 * (1.0 + 1e-14) && best_mask != 0 &&
         card < __builtin_popcount(static_cast<unsigned>(best_mask)))) {
      best_norm2 = n2;
      best_mask = mask;
      best_alpha = alpha;
    }
  }

  if (best_mask == 0) return false;

  std::vector<SimplexVertex> reduced;
  for (int i = 0; i < m; ++i) {
    if (best_mask & (1 << i)) reduced.push_back(simplex[i]);
  }
  simplex = std::move(reduced);
  Eigen::MatrixXd W(d, static_cast<int>(simplex.size()));
  for (size_t i = 0; i < simplex.size(); ++i) W.col(static_cast<int>(i)) = simplex[i].w;
  bary = best_alpha;
  v = W * bary;
  return true;
}

}  // namespace

GjkResult gjk_distance(const PointCloud& a, const PointCloud& b, const GjkOptions& opts) {
  if (a.dim() != b.dim()) throw DimensionError("gjk_distance: dimension mismatch");
  const int d = a.dim();
  const double scale =
      std::max({1.0, a.points.cwiseAbs().maxCoeff(), b.points.cwiseAbs().maxCoeff()});

  GjkResult res;
  res.witness_a = Eigen::VectorXd::Zero(d);
  res.witness_b = Eigen::VectorXd::Zero(d);

  Eigen::VectorXd dir = a.points.rowwise().mean() - b.points.rowwise().mean();
  if (dir.norm() < 1e-300) dir = Eigen::VectorXd::Unit(d, 0);

  std::vector<SimplexVertex> simplex;
  {
    SimplexVertex sv;
    sv.ia = support_index(a.points, -dir);
    sv.ib = support_index(b.points, dir);
    sv.w = a.points.col(sv.ia) - b.points.col(sv.ib);
    simplex.push_back(sv);
  }
  Eigen::VectorXd v = simplex[0].w;
  Eigen::VectorXd bary = Eigen::VectorXd::Ones(1);
  double best_lower = 0.0;

  auto fill_witnesses = [&]() {
    res.witness_a.setZero();
    res.witness_b.setZero();
    for (size_t i = 0; i < simplex.size(); ++i) {
      res.witness_a += bary[static_cast<int>(i)] * a.points.col(simplex[i].ia);
      res.witness_b += bary[static_cast<int>(i)] * b.points.col(simplex[i].ib);
    }
  };

  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    res.iterations = iter;
    const double vnorm = v.norm();
    if (vnorm <= 1e-14 * scale) {
      // Origin inside the hull difference: sets intersect.
      fill_witnesses();
      res.distance = 0.0;
      res.lower_bound = 0.0;
      return res;
    }

    SimplexVertex cand;
    cand.ia = support_index(a.points, -v);
    cand.ib = support_index(b.points, v);
    cand.w = a.points.col(cand.ia) - b.points.col(cand.ib);

    const double lower = v.dot(cand.w) / vnorm;  // support-plane bound
    best_lower = std::max(best_lower, lower);
    if (vnorm - lower <= opts.tolerance * std::max(1.0, vnorm)) {
      fill_witnesses();
      res.distance = vnorm;
      res.lower_bound = std::max(0.0, best_lower);
      return res;
    }

    bool duplicate = false;
    for (const auto& sv : simplex) {
      if ((sv.w - cand.w).norm() <= 1e-14 * scale) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) {
      // Support step stalled: v is already the projection onto the full
      // reachable simplex, accept it.
      fill_witnesses();
      res.distance = vnorm;
      res.lower_bound = std::max(0.0, best_lower);
      return res;
    }

    simplex.push_back(cand);
    if (!project_origin(simplex, v, bary)) {
      fill_witnesses();
      res.distance = vnorm;
      res.lower_bound = std::max(0.0, best_lower);
      return res;
    }
  }

  std::ostringstream oss;
  oss << "gjk_distance: no convergence in " << opts.max_iterations
      << " iterations (bracket [" << std::max(0.0, best_lower) << ", " << v.norm() << "])";
  throw NumericalError(oss.str());
}

namespace {

double hull_lower_bound(const BernsteinPoly& p, const BernsteinPoly& q) {
  const GjkResult g = gjk_distance(PointCloud(p.coeffs()), PointCloud(q.coeffs()));
  return std::max(0.0, g.lower_bound);
}

double hull_lower_bound(const BernsteinPoly& p, const Eigen::VectorXd& point) {
  const GjkResult g = gjk_distance(PointCloud(p.coeffs()), PointCloud::single(point));
  return std::max(0.0, g.lower_bound);
}

double polygon_extent(const BernsteinPoly& p) {
  return (p.coeffs().rowwise().maxCoeff() - p.coeffs().rowwise().minCoeff()).norm();
}

struct BBNode {
  BernsteinPoly p;
  BernsteinPoly q;  // constant polynomial when searching against a point
  double lower;
  long id;
};

struct BBOrder {
  bool operator()(const BBNode& x, const BBNode& y) const {
    if (x.lower != y.lower) return x.lower > y.lower;
    return x.id > y.id;  // earliest-created wins ties
  }
};

DistanceResult bb_min_distance(const BernsteinPoly& p0, const BernsteinPoly& q0,
                               double tol, long node_budget) {
  if (p0.dim() != q0.dim()) throw DimensionError("curve distance: dimension mismatch");
  if (!(tol > 0)) throw ArgumentError("curve distance: tolerance must be positive");

  long next_id = 0;
  std::priority_queue<BBNode, std::vector<BBNode>, BBOrder> heap;

  DistanceResult best;
  best.upper = std::numeric_limits<double>::infinity();

  auto offer_candidate = [&](const BernsteinPoly& p, const BernsteinPoly& q) {
    const double ta = 0.5 * (p.t0() + p.t1());
    const double tb = 0.5 * (q.t0() + q.t1());
    const double d = (p.eval(ta) - q.eval(tb)).norm();
    if (d < best.upper) {
      best.upper = d;
      best.t_a = ta;
      best.t_b = tb;
    }
  };

  auto push_node = [&](BernsteinPoly p, BernsteinPoly q) {
    offer_candidate(p, q);
    const double lb = hull_lower_bound(p, q);
    if (lb < best.upper) {
      heap.push(BBNode{std::move(p), std::move(q), lb, next_id++});
    }
  };

  // Endpoints are coefficients, try them as initial candidates.
  {
    const double d00 = (p0.coeffs().col(0) - q0.coeffs().col(0)).norm();
    const double d11 =
        (p0.coeffs().col(p0.degree()) - q0.coeffs().col(q0.degree())).norm();
    best.upper = d00;
    best.t_a = p0.t0();
    best.t_b = q0.t0();
    if (d11 < best.upper) {
      best.upper = d11;
      best.t_a = p0.t1();
      best.t_b = q0.t1();
    }
  }
  push_node(p0, q0);

  double global_lower = 0.0;
  bool exhausted = true;
  while (!heap.empty()) {
    const BBNode node = heap.top();
    heap.pop();
    ++best.iterations;
    // Hull bounds only tighten under subdivision; keep the bound monotone.
    global_lower = std::max(global_lower, std::min(node.lower, best.upper));
    if (best.upper - global_lower <= tol) {
      exhausted = false;
      break;
    }
    if (best.iterations > node_budget) {
      best.lower = global_lower;
      std::ostringstream oss;
      oss << "curve distance: node budget " << node_budget << " exhausted (bracket ["
          << best.lower << ", " << best.upper << "])";
      throw DistanceBudgetError(oss.str(), best);
    }

    // Split the piece with the larger control polygon extent.
    if (polygon_extent(node.p) >= polygon_extent(node.q)) {
      auto [l, r] = node.p.subdivide(0.5 * (node.p.t0() + node.p.t1()));
      push_node(std::move(l), node.q);
      push_node(std::move(r), node.q);
    } else {
      auto [l, r] = node.q.subdivide(0.5 * (node.q.t0() + node.q.t1()));
      push_node(node.p, std::move(l));
      push_node(node.p, std::move(r));
    }
  }

  // Exhaustion means every piece was pruned at a bound at or above the final
  // upper value, so the bracket is exact.
  if (exhausted) global_lower = best.upper;
  best.lower = std::max(0.0, std::min(global_lower, best.upper));
  return best;
}

}  // namespace

DistanceResult curve_min_distance(const BernsteinPoly& p, const BernsteinPoly& q,
                                  double tol, long node_budget) {
  return bb_min_distance(p, q, tol, node_budget);
}

DistanceResult curve_point_distance(const BernsteinPoly& p, const Eigen::VectorXd& point,
                                    double tol, long node_budget) {
  if (point.size() != p.dim()) {
    throw DimensionError("curve_point_distance: point dimension mismatch");
  }
  return bb_min_distance(p, BernsteinPoly::constant(point, p.t0(), p.t1()), tol,
                         node_budget);
}

namespace {

struct MinNode {
  BernsteinPoly p;
  double lower;
  long id;
};

struct MinOrder {
  bool operator()(const MinNode& x, const MinNode& y) const {
    if (x.lower != y.lower) return x.lower > y.lower;
    return x.id > y.id;
  }
};

// Minimum of a scalar polynomial; used twice (negated for the maximum).
void bb_scalar_min(const BernsteinPoly& p0, double tol, long node_budget,
                   double& value, double& arg, double& lower_out, long& iterations) {
  long next_id = 0;
  std::priority_queue<MinNode, std::vector<MinNode>, MinOrder> heap;

  double best_upper = p0.coeffs()(0, 0);
  double best_arg = p0.t0();
  {
    const double end = p0.coeffs()(0, p0.degree());
    if (end < best_upper) {
      best_upper = end;
      best_arg = p0.t1();
    }
  }

  auto push_node = [&](BernsteinPoly piece) {
    const double mid = 0.5 * (piece.t0() + piece.t1());
    const double v = piece.eval(mid)[0];
    if (v < best_upper) {
      best_upper = v;
      best_arg = mid;
    }
    const double lb = piece.coeffs().minCoeff();
    if (lb < best_upper) heap.push(MinNode{std::move(piece), lb, next_id++});
  };

  push_node(p0);
  double global_lower = -std::numeric_limits<double>::infinity();
  long processed = 0;
  bool exhausted = true;
  while (!heap.empty()) {
    const MinNode node = heap.top();
    heap.pop();
    ++processed;
    global_lower = std::max(global_lower, std::min(node.lower, best_upper));
    if (best_upper - global_lower <= tol) {
      exhausted = false;
      break;
    }
    if (processed > node_budget) {
      ScalarExtrema best;
      best.min_value = best_upper;
      best.argmin = best_arg;
      best.min_lower = global_lower;
      best.iterations = processed;
      std::ostringstream oss;
      oss << "scalar_extrema: node budget " << node_budget << " exhausted (bracket ["
          << global_lower << ", " << best_upper << "])";
      throw ExtremaBudgetError(oss.str(), best);
    }
    auto [l, r] = node.p.subdivide(0.5 * (node.p.t0() + node.p.t1()));
    push_node(std::move(l));
    push_node(std::move(r));
  }
  if (exhausted) global_lower = best_upper;

  value = best_upper;
  arg = best_arg;
  lower_out = std::min(global_lower, best_upper);
  iterations += processed;
}

}  // namespace

ScalarExtrema scalar_extrema(const BernsteinPoly& p, double tol, long node_budget) {
  if (p.dim() != 1) throw DimensionError("scalar_extrema: polynomial must be scalar");
  if (!(tol > 0)) throw ArgumentError("scalar_extrema: tolerance must be positive");

  ScalarExtrema res;
  bb_scalar_min(p, tol, node_budget, res.min_value, res.argmin, res.min_lower,
                res.iterations);

  const BernsteinPoly neg(-p.coeffs(), p.t0(), p.t1());
  double neg_value = 0.0, neg_arg = 0.0, neg_lower = 0.0;
  bb_scalar_min(neg, tol, node_budget, neg_value, neg_arg, neg_lower, res.iterations);
  res.max_value = -neg_value;
  res.argmax = neg_arg;
  res.max_upper = -neg_lower;
  return res;
}

}  // namespace bernopt::geometry
