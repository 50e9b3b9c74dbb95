#pragma once

#include <Eigen/Eigenvalues>

#include "smds/dissim.hpp"

namespace smds {

template <typename Scalar = double>
struct SpectralInit {
  /// all n eigenvalues of the double-centered matrix, descending
  Vector<Scalar> eigenvalues;
  Configuration<Scalar> config;
};

/// Classical (Torgerson) scaling: top-d eigenpairs of -J (Delta o Delta) J / 2.
///
/// Eigenvector signs are fixed so the first coordinate with magnitude above
/// 1e-12 is positive. Columns whose eigenvalue is not positive are zero.
/// With repeated eigenvalues the basis is arbitrary; compare distances,
/// not coordinates.
template <typename Scalar>
SpectralInit<Scalar> classical_mds(const DissimilarityMatrix<Scalar>& delta, Index d) {
  const Index n = delta.size();
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "embedding dimension must be >= 1");
  if (d > n - 1) throw Error(ErrorCode::DimensionTooLarge, "d must be <= n - 1");

  Matrix<Scalar> b = delta.matrix().array().square().matrix();
  const Vector<Scalar> row_mean = b.rowwise().mean();
  const Scalar grand_mean = row_mean.mean();
  b.colwise() -= row_mean;
  b.rowwise() -= row_mean.transpose();
  b.array() += grand_mean;
  b *= Scalar(-0.5);
  b = (b + b.transpose()) / Scalar(2);

  const Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(b);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "eigensolver failed");

  SpectralInit<Scalar> out;
  out.eigenvalues = eig.eigenvalues().reverse();
  out.config = Configuration<Scalar>::Zero(n, d);
  for (Index c = 0; c < d; ++c) {
    const Scalar lambda = out.eigenvalues(c);
    if (!(lambda > Scalar(0))) continue;
    Vector<Scalar> v = eig.eigenvectors().col(n - 1 - c);
    for (Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > Scalar(1e-12)) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    out.config.col(c) = v * std::sqrt(lambda);
  }
  out.config.rowwise() -= out.config.colwise().mean();
  return out;
}

}  // namespace smds
