#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "smds/types.hpp"

namespace smds {

namespace detail {

inline std::string cell(Index i, Index j) {
  std::ostringstream os;
  os << "(" << i << "," << j << ")";
  return os.str();
}

}  // namespace detail

/// Absolute tolerance for symmetry and hollowness checks on file input.
inline constexpr double kValidationTolerance = 1e-12;

/// Symmetric, hollow, nonnegative n x n matrix of pairwise dissimilarities.
///
/// Instances are immutable. The checked entry point is
/// validate_dissimilarity(); euclidean_distances() and the graph routines
/// build them through unchecked() because their output satisfies the
/// invariants by construction.
template <typename Scalar = double>
class DissimilarityMatrix {
 public:
  DissimilarityMatrix() = default;

  /// Wraps `m` without validation. The caller guarantees the invariants.
  static DissimilarityMatrix unchecked(Matrix<Scalar> m) {
    DissimilarityMatrix out;
    out.entries_ = std::move(m);
    return out;
  }

  Index size() const { return entries_.rows(); }
  Scalar operator()(Index i, Index j) const { return entries_(i, j); }
  const Matrix<Scalar>& matrix() const { return entries_; }

  Scalar max_entry() const { return entries_.size() == 0 ? Scalar(0) : entries_.maxCoeff(); }

 private:
  Matrix<Scalar> entries_;
};

/// Rejects, never repairs, a raw matrix that is not a valid dissimilarity.
///
/// The diagonal is snapped to exact zero and the lower triangle is mirrored
/// from the upper one so the stored matrix is exactly symmetric; both are
/// no-ops beyond the 1e-12 acceptance tolerance.
template <typename Derived>
DissimilarityMatrix<typename Derived::Scalar> validate_dissimilarity(
    const Eigen::MatrixBase<Derived>& raw) {
  using Scalar = typename Derived::Scalar;
  if (raw.rows() != raw.cols() || raw.rows() == 0) {
    std::ostringstream os;
    os << raw.rows() << "x" << raw.cols();
    throw Error(ErrorCode::NotSquare, os.str());
  }
  const Index n = raw.rows();
  const Scalar tol = Scalar(kValidationTolerance);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Scalar v = raw(i, j);
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, detail::cell(i, j));
      if (v < Scalar(0)) throw Error(ErrorCode::NegativeEntry, detail::cell(i, j));
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (std::abs(raw(i, i)) > tol) throw Error(ErrorCode::NonzeroDiagonal, detail::cell(i, i));
    for (Index j = i + 1; j < n; ++j) {
      if (std::abs(raw(i, j) - raw(j, i)) > tol)
        throw Error(ErrorCode::Asymmetric, detail::cell(i, j));
    }
  }
  Matrix<Scalar> m = raw.template triangularView<Eigen::StrictlyUpper>();
  m.template triangularView<Eigen::StrictlyLower>() = m.transpose();
  return DissimilarityMatrix<Scalar>::unchecked(std::move(m));
}

/// Pairwise Euclidean distances between the rows of `config`.
template <typename Derived>
DissimilarityMatrix<typename Derived::Scalar> euclidean_distances(
    const Eigen::MatrixBase<Derived>& config) {
  using Scalar = typename Derived::Scalar;
  const Index n = config.rows();
  Matrix<Scalar> d = Matrix<Scalar>::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = (config.row(i) - config.row(j)).norm();
    }
  }
  return DissimilarityMatrix<Scalar>::unchecked(std::move(d));
}

/// log of the smallest r with 1/r <= a_ij / b_ij <= r over off-diagonal
/// pairs. Pairs where both entries vanish are skipped.
template <typename Scalar>
Scalar ratio_metric(const DissimilarityMatrix<Scalar>& a, const DissimilarityMatrix<Scalar>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "ratio_metric");
  const Index n = a.size();
  Scalar worst = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const bool za = a(i, j) == Scalar(0);
      const bool zb = b(i, j) == Scalar(0);
      if (za != zb) throw Error(ErrorCode::InfiniteRatio, detail::cell(i, j));
      if (zb) continue;
      worst = std::max(worst, std::abs(std::log(a(i, j)) - std::log(b(i, j))));
    }
  }
  return worst;
}

/// Empirical L^p distance with uniform mass 1/n^2 on every cell.
template <typename Scalar>
Scalar lp_discrepancy(const DissimilarityMatrix<Scalar>& a, const DissimilarityMatrix<Scalar>& b,
                      Scalar p) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "lp_discrepancy");
  if (!(p >= Scalar(1))) throw Error(ErrorCode::InvalidArgument, "p must be >= 1");
  const Index n = a.size();
  if (n == 0) return Scalar(0);
  const Scalar mean =
      (a.matrix() - b.matrix()).array().abs().pow(p).sum() / (Scalar(n) * Scalar(n));
  return std::pow(mean, Scalar(1) / p);
}

/// Largest absolute entrywise difference.
template <typename Scalar>
Scalar sup_discrepancy(const DissimilarityMatrix<Scalar>& a, const DissimilarityMatrix<Scalar>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "sup_discrepancy");
  if (a.size() == 0) return Scalar(0);
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

/// Symmetric matrix of nonnegative finite weights w_ij. The diagonal is
/// ignored by every consumer.
template <typename Scalar = double>
class WeightMatrix {
 public:
  WeightMatrix() = default;

  /// w_ij = 1/n^2 for every cell.
  static WeightMatrix uniform(Index n) {
    WeightMatrix w;
    w.entries_ = Matrix<Scalar>::Constant(n, n, Scalar(1) / (Scalar(n) * Scalar(n)));
    return w;
  }

  template <typename Derived>
  static WeightMatrix from_matrix(const Eigen::MatrixBase<Derived>& raw) {
    if (raw.rows() != raw.cols() || raw.rows() == 0)
      throw Error(ErrorCode::NotSquare, "weight matrix");
    const Index n = raw.rows();
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (!std::isfinite(raw(i, j))) throw Error(ErrorCode::NonFinite, detail::cell(i, j));
        if (raw(i, j) < Scalar(0)) throw Error(ErrorCode::NegativeEntry, detail::cell(i, j));
        if (raw(i, j) != raw(j, i)) throw Error(ErrorCode::Asymmetric, detail::cell(i, j));
      }
    }
    WeightMatrix w;
    w.entries_ = raw;
    return w;
  }

  Index size() const { return entries_.rows(); }
  Scalar operator()(Index i, Index j) const { return entries_(i, j); }
  const Matrix<Scalar>& matrix() const { return entries_; }

  /// True when every off-diagonal weight is the same value.
  bool is_constant_off_diagonal() const {
    const Index n = size();
    if (n < 2) return true;
    const Scalar w0 = entries_(0, 1);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j && entries_(i, j) != w0) return false;
    return true;
  }

 private:
  Matrix<Scalar> entries_;
};

}  // namespace smds
