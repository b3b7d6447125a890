#pragma once

// Shared helpers for the test suites: independently-implemented small-scale
// oracles (exhaustive simplex projection, pattern-search projection onto the
// n=2, k=2 feasible set) and finite-difference utilities.  None of these
// reuse the library's projection or eigen-clamp code paths, so agreement is
// a genuine cross-check.

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "locpred/indexing.hpp"

namespace testsupport {

// Central finite difference of a scalar matrix function along a direction.
inline double central_difference(
    const std::function<double(const Eigen::MatrixXd&)>& f,
    const Eigen::MatrixXd& at, const Eigen::MatrixXd& dir, double h) {
  return (f(at + h * dir) - f(at - h * dir)) / (2.0 * h);
}

// Euclidean projection onto {x >= 0, sum x = total} by exhaustive support
// enumeration: the optimum restricted to a support S is y_S shifted by
// (total - sum y_S)/|S|, and the true projection is the best feasible
// candidate over all supports.  Exponential in dimension; use dim <= 12.
inline Eigen::VectorXd simplex_project_exhaustive(const Eigen::VectorXd& y,
                                                  double total = 1.0) {
  const int m = static_cast<int>(y.size());
  Eigen::VectorXd best = Eigen::VectorXd::Zero(m);
  double best_dist = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) {
        sum += y[i];
        ++count;
      }
    const double shift = (total - sum) / count;
    Eigen::VectorXd cand = Eigen::VectorXd::Zero(m);
    bool ok = true;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) {
        cand[i] = y[i] + shift;
        if (cand[i] < 0.0) {
          ok = false;
          break;
        }
      }
    if (!ok) continue;
    const double dist = (cand - y).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = cand;
    }
  }
  return best;
}

// The n=2, k=2 feasible set has exactly three degrees of freedom: the two
// marginals p1 = P[first item gets label 0], q1 = P[second item gets label
// 0], and the joint mass b11 = P[both get label 0].  Positive
// semidefiniteness forces the off-diagonal block's row and column sums to
// match the marginals, which determines the rest of the block.
inline Eigen::Matrix4d feasible_point_2x2(double p1, double q1, double b11) {
  Eigen::Matrix4d x = Eigen::Matrix4d::Zero();
  x(0, 0) = p1;
  x(1, 1) = 1.0 - p1;
  x(2, 2) = q1;
  x(3, 3) = 1.0 - q1;
  const double b12 = p1 - b11;
  const double b21 = q1 - b11;
  const double b22 = 1.0 - p1 - q1 + b11;
  x(0, 2) = b11;
  x(0, 3) = b12;
  x(1, 2) = b21;
  x(1, 3) = b22;
  x(2, 0) = b11;
  x(3, 0) = b12;
  x(2, 1) = b21;
  x(3, 1) = b22;
  return x;
}

inline bool params_feasible_2x2(double p1, double q1, double b11) {
  if (p1 < 0.0 || p1 > 1.0 || q1 < 0.0 || q1 > 1.0) return false;
  if (b11 < std::max(0.0, p1 + q1 - 1.0) - 1e-15 ||
      b11 > std::min(p1, q1) + 1e-15)
    return false;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(
      feasible_point_2x2(p1, q1, b11), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-12;
}

// Projection oracle for n=2, k=2: coarse grid over the three parameters,
// then a shrinking pattern search.  Convex objective over a convex
// three-dimensional set, so the local refinement reaches the global
// optimum to well below the tolerances the tests use it at.
inline Eigen::Matrix4d project_oracle_2x2(const Eigen::MatrixXd& m) {
  const auto dist2 = [&](double p1, double q1, double b11) {
    if (!params_feasible_2x2(p1, q1, b11))
      return std::numeric_limits<double>::infinity();
    return (feasible_point_2x2(p1, q1, b11) - m).squaredNorm();
  };

  double bp = 0.5, bq = 0.5, bb = 0.25;
  double best = dist2(bp, bq, bb);
  const int g = 24;
  for (int i = 0; i <= g; ++i)
    for (int j = 0; j <= g; ++j) {
      const double p1 = double(i) / g;
      const double q1 = double(j) / g;
      const double lo = std::max(0.0, p1 + q1 - 1.0);
      const double hi = std::min(p1, q1);
      for (int l = 0; l <= g; ++l) {
        const double b11 = lo + (hi - lo) * double(l) / g;
        const double d = dist2(p1, q1, b11);
        if (d < best) {
          best = d;
          bp = p1;
          bq = q1;
          bb = b11;
        }
      }
    }

  double radius = 1.0 / g;
  while (radius > 1e-10) {
    bool improved = false;
    const double candidates[6][3] = {
        {bp + radius, bq, bb}, {bp - radius, bq, bb}, {bp, bq + radius, bb},
        {bp, bq - radius, bb}, {bp, bq, bb + radius}, {bp, bq, bb - radius}};
    for (const auto& c : candidates) {
      const double d = dist2(c[0], c[1], c[2]);
      if (d < best) {
        best = d;
        bp = c[0];
        bq = c[1];
        bb = c[2];
        improved = true;
      }
    }
    if (!improved) radius *= 0.5;
  }
  return feasible_point_2x2(bp, bq, bb);
}

// Deterministic dense symmetric matrix for fixtures.
inline Eigen::MatrixXd symmetric_from_rng(int dim, std::mt19937_64& rng,
                                          double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = normal(rng);
  return scale * 0.5 * (m + m.transpose());
}

}  // namespace testsupport
