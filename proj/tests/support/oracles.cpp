#include "support/oracles.hpp"

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace testsupport {

namespace {

void subsets_up_to(int n, int max_card, std::vector<std::vector<int>>& out) {
  for (int mask = 1; mask < (1 << n); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) > max_card) continue;
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) idx.push_back(i);
    }
    out.push_back(std::move(idx));
  }
}

}  // namespace

double exhaustive_hull_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const int d = static_cast<int>(a.rows());
  const int max_card = d + 1;
  std::vector<std::vector<int>> subs_a, subs_b;
  subsets_up_to(static_cast<int>(a.cols()), max_card, subs_a);
  subsets_up_to(static_cast<int>(b.cols()), max_card, subs_b);

  double best = std::numeric_limits<double>::infinity();
  for (const auto& sa : subs_a) {
    Eigen::MatrixXd A(d, sa.size());
    for (size_t i = 0; i < sa.size(); ++i) A.col(static_cast<int>(i)) = a.col(sa[i]);
    for (const auto& sb : subs_b) {
      Eigen::MatrixXd B(d, sb.size());
      for (size_t i = 0; i < sb.size(); ++i) B.col(static_cast<int>(i)) = b.col(sb[i]);

      const int na = static_cast<int>(sa.size());
      const int nb = static_cast<int>(sb.size());
      const int m = na + nb;
      Eigen::MatrixXd W(d, m);
      W.leftCols(na) = A;
      W.rightCols(nb) = -B;

      // minimize ||W g||^2 subject to sum(alpha)=1, sum(beta)=1
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m + 2, m + 2);
      K.topLeftCorner(m, m) = W.transpose() * W;
      for (int i = 0; i < na; ++i) {
        K(i, m) = 1.0;
        K(m, i) = 1.0;
      }
      for (int i = 0; i < nb; ++i) {
        K(na + i, m + 1) = 1.0;
        K(m + 1, na + i) = 1.0;
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 2);
      rhs[m] = 1.0;
      rhs[m + 1] = 1.0;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
      if (!lu.isInvertible()) continue;
      const Eigen::VectorXd g = lu.solve(rhs).head(m);
      if ((g.array() < -1e-10).any()) continue;
      best = std::min(best, (W * g).norm());
    }
  }
  return best;
}

double grid_min_distance(const bernopt::BernsteinPoly& p, const bernopt::BernsteinPoly& q,
                         int na, int nb, double* arg_a, double* arg_b) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<Eigen::VectorXd> qs(nb);
  std::vector<double> tbs(nb);
  for (int j = 0; j < nb; ++j) {
    tbs[j] = q.t0() + (q.t1() - q.t0()) * j / (nb - 1);
    qs[j] = q.eval(tbs[j]);
  }
  for (int i = 0; i < na; ++i) {
    const double ta = p.t0() + (p.t1() - p.t0()) * i / (na - 1);
    const Eigen::VectorXd pa = p.eval(ta);
    for (int j = 0; j < nb; ++j) {
      const double dist = (pa - qs[j]).norm();
      if (dist < best) {
        best = dist;
        if (arg_a) *arg_a = ta;
        if (arg_b) *arg_b = tbs[j];
      }
    }
  }
  return best;
}

double grid_min_point_distance(const bernopt::BernsteinPoly& p,
                               const Eigen::VectorXd& point, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double t = p.t0() + (p.t1() - p.t0()) * i / (n - 1);
    best = std::min(best, (p.eval(t) - point).norm());
  }
  return best;
}

double speed_bound(const bernopt::BernsteinPoly& p) {
  const bernopt::BernsteinPoly d = p.derivative();
  double best = 0.0;
  for (int j = 0; j <= d.degree(); ++j) best = std::max(best, d.coeffs().col(j).norm());
  return best;
}

bernopt::BernsteinPoly random_poly(std::mt19937& rng, int dim, int degree, double t0,
                                   double t1, double lo, double hi) {
  Eigen::MatrixXd c(dim, degree + 1);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= degree; ++j) c(i, j) = uniform(rng, lo, hi);
  }
  return bernopt::BernsteinPoly(std::move(c), t0, t1);
}

}  // namespace testsupport
