#pragma once

#include <algorithm>
#include <cmath>
#include <queue>

#include "smds/dissim.hpp"

namespace smds {

/// Weighted raw stress, summed over all ordered pairs (i, j).
template <typename Scalar, typename Derived>
Scalar raw_stress(const DissimilarityMatrix<Scalar>& delta, const WeightMatrix<Scalar>& weights,
                  const Eigen::MatrixBase<Derived>& config) {
  const Index n = delta.size();
  if (weights.size() != n || config.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "raw_stress");
  Scalar sum = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const Scalar r = (config.row(i) - config.row(j)).norm() - delta(i, j);
      sum += (weights(i, j) + weights(j, i)) * r * r;
    }
  }
  return sum;
}

/// Combinatorial Laplacian of the graph with edge weights w_ij, i != j.
template <typename Scalar>
Matrix<Scalar> weight_laplacian(const WeightMatrix<Scalar>& weights) {
  const Index n = weights.size();
  Matrix<Scalar> lap = -weights.matrix();
  lap.diagonal().setZero();
  for (Index i = 0; i < n; ++i) lap(i, i) = -lap.row(i).sum();
  return lap;
}

/// trace(X^t L X), the squared L-seminorm of a configuration difference.
template <typename Scalar, typename Derived>
Scalar laplacian_quadratic(const Matrix<Scalar>& lap, const Eigen::MatrixBase<Derived>& x) {
  return (x.transpose() * lap * x).trace();
}

/// The Guttman transform Z -> (L + ee^t)^{-1} M(Z) Z for a fixed weight
/// graph.
///
/// The SPD factorization of L + ee^t is computed once at construction and
/// reused by every apply(). When all off-diagonal weights share one value w
/// the solve is skipped: on centered right-hand sides (L + ee^t) acts as
/// w*n*I, so the transform is M(Z) Z / (w n). Immutable after construction.
template <typename Scalar = double>
class GuttmanOperator {
 public:
  explicit GuttmanOperator(WeightMatrix<Scalar> weights, bool allow_fastpath = true)
      : weights_(std::move(weights)) {
    const Index n = weights_.size();
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty weight matrix");
    check_connected();
    laplacian_ = weight_laplacian(weights_);
    uniform_ = allow_fastpath && weights_.is_constant_off_diagonal();
    if (uniform_) {
      uniform_scale_ = n > 1 ? weights_(0, 1) * Scalar(n) : Scalar(1);
    } else {
      Matrix<Scalar> shifted = laplacian_;
      shifted.array() += Scalar(1);
      llt_.compute(shifted);
      if (llt_.info() != Eigen::Success)
        throw Error(ErrorCode::DisconnectedWeights, "L + ee^t is not positive definite");
    }
  }

  Index size() const { return weights_.size(); }
  bool uniform_fastpath() const { return uniform_; }
  const WeightMatrix<Scalar>& weights() const { return weights_; }
  const Matrix<Scalar>& laplacian() const { return laplacian_; }

  /// M(Z) Z, where M(Z) is the Laplacian of the graph with edge weights
  /// w_ij * delta_ij / d_ij. Pairs at distance zero contribute no edge.
  template <typename Derived>
  Matrix<Scalar> stress_product(const DissimilarityMatrix<Scalar>& delta,
                                const Eigen::MatrixBase<Derived>& z) const {
    const Index n = size();
    if (delta.size() != n || z.rows() != n)
      throw Error(ErrorCode::DimensionMismatch, "guttman operator");
    Matrix<Scalar> out = Matrix<Scalar>::Zero(n, z.cols());
    Vector<Scalar> diff(z.cols());
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const Scalar w = weights_(i, j);
        if (w == Scalar(0) || delta(i, j) == Scalar(0)) continue;
        diff = (z.row(i) - z.row(j)).transpose();
        const Scalar d = diff.norm();
        if (d == Scalar(0)) continue;
        const Scalar b = w * delta(i, j) / d;
        out.row(i) += b * diff.transpose();
        out.row(j) -= b * diff.transpose();
      }
    }
    return out;
  }

  template <typename Derived>
  Configuration<Scalar> apply(const DissimilarityMatrix<Scalar>& delta,
                              const Eigen::MatrixBase<Derived>& z) const {
    Matrix<Scalar> rhs = stress_product(delta, z);
    if (uniform_) {
      rhs /= uniform_scale_;
      // M(Z)Z has zero column sums in exact arithmetic; remove the rounding drift.
      rhs.rowwise() -= rhs.colwise().mean();
      return rhs;
    }
    Configuration<Scalar> out = llt_.solve(rhs);
    out.rowwise() -= out.colwise().mean();
    return out;
  }

 private:
  void check_connected() const {
    const Index n = weights_.size();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<Index> frontier;
    frontier.push(0);
    seen[0] = 1;
    Index reached = 1;
    while (!frontier.empty()) {
      const Index u = frontier.front();
      frontier.pop();
      for (Index v = 0; v < n; ++v) {
        if (v == u || seen[static_cast<std::size_t>(v)] || weights_(u, v) <= Scalar(0)) continue;
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        frontier.push(v);
      }
    }
    if (reached != n) {
      std::ostringstream os;
      os << "weight graph reaches " << reached << " of " << n << " objects";
      throw Error(ErrorCode::DisconnectedWeights, os.str());
    }
  }

  WeightMatrix<Scalar> weights_;
  Matrix<Scalar> laplacian_;
  Eigen::LLT<Matrix<Scalar>> llt_;
  bool uniform_ = false;
  Scalar uniform_scale_ = 1;
};

template <typename Scalar, typename Derived>
Configuration<Scalar> guttman_transform(const GuttmanOperator<Scalar>& op,
                                        const DissimilarityMatrix<Scalar>& delta,
                                        const Eigen::MatrixBase<Derived>& config) {
  return op.apply(delta, config);
}

/// ||L Z - M(Z) Z||_F / (n d). Zero at every fixed point of the transform.
///
/// A configuration with all points coincident is in the kernel of both L
/// and M(Z), so it reports zero even when delta is nonzero.
template <typename Scalar, typename Derived>
Scalar stationarity_residual(const GuttmanOperator<Scalar>& op,
                             const DissimilarityMatrix<Scalar>& delta,
                             const Eigen::MatrixBase<Derived>& config) {
  const Index n = config.rows();
  const Index d = config.cols();
  if (n == 0 || d == 0) return Scalar(0);
  const Matrix<Scalar> r = op.laplacian() * config - op.stress_product(delta, config);
  return r.norm() / Scalar(n * d);
}

enum class Termination { Converged, MaxIterations, StationaryStart };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "Converged";
    case Termination::MaxIterations: return "MaxIterations";
    case Termination::StationaryStart: return "StationaryStart";
  }
  return "Unknown";
}

template <typename Scalar = double>
struct SolveReport {
  Configuration<Scalar> config;
  /// stress of the initial configuration followed by one entry per iteration
  std::vector<Scalar> stress_trace;
  Index iterations = 0;
  Termination termination = Termination::MaxIterations;
  /// trace(dZ^t L dZ) for the last step taken
  Scalar last_step_laplacian = 0;

  Scalar final_stress() const { return stress_trace.back(); }
};

struct SolveOptions {
  double tol = 1e-9;
  Index max_iters = 10000;
  /// guards the relative-decrease test when stress reaches zero
  double stress_floor = 1e-30;
};

/// Fixed-point iteration of the Guttman transform from `init`.
///
/// Stops when the relative stress decrease drops below `tol`. A first step
/// that already meets the test is reported as StationaryStart.
template <typename Scalar, typename Derived>
SolveReport<Scalar> solve_unconstrained(const GuttmanOperator<Scalar>& op,
                                        const DissimilarityMatrix<Scalar>& delta,
                                        const Eigen::MatrixBase<Derived>& init,
                                        const SolveOptions& opts = {}) {
  if (opts.max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  if (!(opts.tol > 0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (delta.size() != op.size() || init.rows() != op.size())
    throw Error(ErrorCode::DimensionMismatch, "solve_unconstrained");

  SolveReport<Scalar> report;
  Configuration<Scalar> z = init;
  Scalar stress = raw_stress(delta, op.weights(), z);
  report.stress_trace.push_back(stress);
  for (Index k = 1; k <= opts.max_iters; ++k) {
    Configuration<Scalar> next = op.apply(delta, z);
    const Scalar next_stress = raw_stress(delta, op.weights(), next);
    report.stress_trace.push_back(next_stress);
    report.last_step_laplacian = laplacian_quadratic(op.laplacian(), next - z);
    report.iterations = k;
    const Scalar rel = (stress - next_stress) / std::max(stress, Scalar(opts.stress_floor));
    z = std::move(next);
    stress = next_stress;
    if (rel < Scalar(opts.tol)) {
      report.termination = k == 1 ? Termination::StationaryStart : Termination::Converged;
      break;
    }
  }
  report.config = std::move(z);
  return report;
}

template <typename Scalar, typename Derived>
SolveReport<Scalar> solve_unconstrained(const DissimilarityMatrix<Scalar>& delta,
                                        const WeightMatrix<Scalar>& weights,
                                        const Eigen::MatrixBase<Derived>& init,
                                        const SolveOptions& opts = {}) {
  const GuttmanOperator<Scalar> op(weights);
  return solve_unconstrained(op, delta, init, opts);
}

}  // namespace smds
