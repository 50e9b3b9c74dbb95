#pragma once

// Test-only generators and independent oracles.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "smds/dissim.hpp"

namespace smds::testing {

using Mat = Eigen::MatrixXd;

inline Mat random_matrix(Index rows, Index cols, std::mt19937_64& rng, double lo = -1,
                         double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

/// Symmetric hollow matrix with off-diagonal entries uniform in [lo, hi].
inline DissimilarityMatrix<double> random_dissimilarity(Index n, std::mt19937_64& rng,
                                                        double lo = 0, double hi = 2) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat m = Mat::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) m(i, j) = m(j, i) = u(rng);
  return validate_dissimilarity(m);
}

inline Index random_index(std::mt19937_64& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

/// Literal double sum over ordered pairs.
inline double naive_stress(const Mat& delta, const Mat& w, const Mat& z) {
  double s = 0;
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index j = 0; j < z.rows(); ++j) {
      double d2 = 0;
      for (Index k = 0; k < z.cols(); ++k) d2 += (z(i, k) - z(j, k)) * (z(i, k) - z(j, k));
      const double r = std::sqrt(d2) - delta(i, j);
      s += w(i, j) * r * r;
    }
  }
  return s;
}

/// Central-difference gradient of the literal stress sum.
inline Mat fd_stress_gradient(const Mat& delta, const Mat& w, const Mat& z, double h = 1e-6) {
  Mat g(z.rows(), z.cols());
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index k = 0; k < z.cols(); ++k) {
      Mat zp = z, zm = z;
      zp(i, k) += h;
      zm(i, k) -= h;
      g(i, k) = (naive_stress(delta, w, zp) - naive_stress(delta, w, zm)) / (2 * h);
    }
  }
  return g;
}

/// Floyd-Warshall over a dense weight matrix (infinity = no edge).
inline Mat floyd_warshall(Mat d) {
  const Index n = d.rows();
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
  return d;
}

/// Nearest point of {x : |x_i - x_j| <= caps(i,j), i < j} to y in R^n by
/// enumerating every active set with signs. The convex optimum is the
/// projection of y onto the affine set of its own active constraints, so
/// the best feasible candidate is exact.
inline Eigen::VectorXd brute_force_interval_projection(const Eigen::VectorXd& y, const Mat& caps) {
  const Index n = y.size();
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) pairs.push_back({i, j});
  const Index m = static_cast<Index>(pairs.size());
  Index combos = 1;
  for (Index p = 0; p < m; ++p) combos *= 3;

  Eigen::VectorXd best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (Index code = 0; code < combos; ++code) {
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> rhs;
    Index c = code;
    for (Index p = 0; p < m; ++p, c /= 3) {
      const Index state = c % 3;
      if (state == 0) continue;
      Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(n);
      const double sign = state == 1 ? 1.0 : -1.0;
      a(pairs[p].first) = sign;
      a(pairs[p].second) = -sign;
      rows.push_back(a);
      rhs.push_back(caps(pairs[p].first, pairs[p].second));
    }
    Eigen::VectorXd x = y;
    if (!rows.empty()) {
      Mat a(static_cast<Index>(rows.size()), n);
      Eigen::VectorXd b(static_cast<Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        a.row(static_cast<Index>(r)) = rows[r];
        b(static_cast<Index>(r)) = rhs[r];
      }
      const Mat aat = a * a.transpose();
      const Eigen::VectorXd lambda = aat.completeOrthogonalDecomposition().solve(a * y - b);
      x = y - a.transpose() * lambda;
      if ((a * x - b).cwiseAbs().maxCoeff() > 1e-9) continue;
    }
    bool feasible = true;
    for (const auto& [i, j] : pairs)
      if (std::abs(x(i) - x(j)) > caps(i, j) + 1e-12) feasible = false;
    if (!feasible) continue;
    const double obj = (x - y).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
  }
  return best;
}

/// Median of a copy.
inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace smds::testing
