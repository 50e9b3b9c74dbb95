#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "smds/stress.hpp"

namespace smds {

/// Upper bounds ||z_i - z_j|| <= caps(i, j) on pairwise distances. An
/// infinite cap leaves the pair unconstrained.
template <typename Scalar = double>
class ConstraintSet {
 public:
  ConstraintSet() = default;

  static ConstraintSet unconstrained(Index n) {
    ConstraintSet c;
    c.caps_ = Matrix<Scalar>::Constant(n, n, std::numeric_limits<Scalar>::infinity());
    return c;
  }

  /// caps(i, j) = k * delta(i, j)
  static ConstraintSet lipschitz(const DissimilarityMatrix<Scalar>& delta, Scalar k) {
    if (!(k >= Scalar(0)) || !std::isfinite(k))
      throw Error(ErrorCode::InvalidArgument, "Lipschitz constant must be finite and >= 0");
    ConstraintSet c;
    c.caps_ = k * delta.matrix();
    return c;
  }

  void set_cap(Index i, Index j, Scalar cap) {
    if (!(cap >= Scalar(0))) throw Error(ErrorCode::InvalidArgument, "cap must be >= 0");
    caps_(i, j) = caps_(j, i) = cap;
  }

  Index size() const { return caps_.rows(); }
  Scalar cap(Index i, Index j) const { return caps_(i, j); }

  Scalar max_finite_cap() const {
    Scalar m = 0;
    for (Index i = 0; i < size(); ++i)
      for (Index j = i + 1; j < size(); ++j)
        if (std::isfinite(caps_(i, j))) m = std::max(m, caps_(i, j));
    return m;
  }

 private:
  Matrix<Scalar> caps_;
};

/// Nearest point (Frobenius) of {||z_i - z_j|| <= cap}: z_i and z_j move
/// toward each other by equal amounts along their connecting segment.
/// cap == 0 collapses both onto their midpoint.
template <typename Scalar>
void project_pair_inplace(Configuration<Scalar>& z, Index i, Index j, Scalar cap) {
  if (i == j) throw Error(ErrorCode::InvalidArgument, "project_pair needs i != j");
  if (!(cap >= Scalar(0))) throw Error(ErrorCode::InvalidArgument, "cap must be >= 0");
  const Vector<Scalar> diff = (z.row(i) - z.row(j)).transpose();
  const Scalar dist = diff.norm();
  if (dist <= cap) return;
  if (cap == Scalar(0)) {
    const Vector<Scalar> mid = (z.row(i) + z.row(j)).transpose() / Scalar(2);
    z.row(i) = mid.transpose();
    z.row(j) = mid.transpose();
    return;
  }
  const Vector<Scalar> move = diff * ((dist - cap) / (Scalar(2) * dist));
  z.row(i) -= move.transpose();
  z.row(j) += move.transpose();
}

template <typename Scalar>
Configuration<Scalar> project_pair(Configuration<Scalar> z, Index i, Index j, Scalar cap) {
  project_pair_inplace(z, i, j, cap);
  return z;
}

/// max over finite-cap pairs of max(0, ||z_i - z_j|| - cap_ij)
template <typename Scalar, typename Derived>
Scalar max_violation(const Eigen::MatrixBase<Derived>& z, const ConstraintSet<Scalar>& constraints) {
  if (z.rows() != constraints.size()) throw Error(ErrorCode::DimensionMismatch, "max_violation");
  Scalar worst = 0;
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index j = i + 1; j < z.rows(); ++j) {
      const Scalar cap = constraints.cap(i, j);
      if (!std::isfinite(cap)) continue;
      worst = std::max(worst, (z.row(i) - z.row(j)).norm() - cap);
    }
  }
  return worst;
}

template <typename Scalar = double>
struct DykstraResult {
  Configuration<Scalar> config;
  Index cycles = 0;
  Scalar max_violation = 0;
  bool converged = false;
};

/// Raised by dykstra_project() when the cycle budget runs out. Carries the
/// last iterate.
template <typename Scalar>
class MaxCyclesExceeded : public Error {
 public:
  explicit MaxCyclesExceeded(DykstraResult<Scalar> best)
      : Error(ErrorCode::MaxCyclesExceeded,
              "Dykstra stopped after " + std::to_string(best.cycles) +
                  " cycles, max violation " + std::to_string(double(best.max_violation))),
        best_(std::move(best)) {}

  const DykstraResult<Scalar>& best() const noexcept { return best_; }

 private:
  DykstraResult<Scalar> best_;
};

/// Dykstra's cyclic projection onto the intersection of all finite caps.
///
/// Pairs are visited in lexicographic order (i < j). Each pair keeps one
/// correction vector for z_i; the correction for z_j is its negative since
/// a pair projection moves the two points by opposite amounts. Stops once
/// the max violation and the largest per-cycle correction change are both
/// within tol * (1 + max finite cap).
///
/// `warm`, when given, holds the corrections (d rows, one column per
/// finite-cap pair in visiting order) from an earlier run on the same
/// constraints and receives the final ones. Dykstra is coordinate ascent
/// on the dual problem, so any such start converges to the same projection.
template <typename Scalar, typename Derived>
DykstraResult<Scalar> dykstra_project_report(const Eigen::MatrixBase<Derived>& config,
                                             const ConstraintSet<Scalar>& constraints, Scalar tol,
                                             Index max_cycles, Matrix<Scalar>* warm = nullptr) {
  if (config.rows() != constraints.size())
    throw Error(ErrorCode::DimensionMismatch, "dykstra_project");
  if (!(tol > Scalar(0))) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (max_cycles < 1) throw Error(ErrorCode::InvalidArgument, "max_cycles must be >= 1");

  struct Pair {
    Index i, j;
    Scalar cap;
  };
  const Index n = config.rows();
  const Index d = config.cols();
  std::vector<Pair> pairs;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::isfinite(constraints.cap(i, j))) pairs.push_back({i, j, constraints.cap(i, j)});

  const Scalar scaled_tol = tol * (Scalar(1) + constraints.max_finite_cap());
  DykstraResult<Scalar> out;
  out.config = config;
  const Index m = static_cast<Index>(pairs.size());
  Matrix<Scalar> local;
  Matrix<Scalar>& corrections = warm ? *warm : local;
  if (corrections.rows() != d || corrections.cols() != m) {
    corrections = Matrix<Scalar>::Zero(d, m);
  } else {
    for (Index p = 0; p < m; ++p) {
      out.config.row(pairs[static_cast<std::size_t>(p)].i) -= corrections.col(p).transpose();
      out.config.row(pairs[static_cast<std::size_t>(p)].j) += corrections.col(p).transpose();
    }
  }
  Vector<Scalar> yi(d), yj(d), diff(d), move(d);
  for (Index cycle = 1; cycle <= max_cycles; ++cycle) {
    Scalar max_change = 0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j, cap] = pairs[p];
      auto corr = corrections.col(static_cast<Index>(p));
      yi = out.config.row(i).transpose() + corr;
      yj = out.config.row(j).transpose() - corr;
      diff = yi - yj;
      const Scalar dist = diff.norm();
      if (dist <= cap) {
        move.setZero();
      } else if (cap == Scalar(0)) {
        move = diff / Scalar(2);
      } else {
        move = diff * ((dist - cap) / (Scalar(2) * dist));
      }
      if (cap == Scalar(0) && dist > Scalar(0)) {
        // exact averaging keeps collapsed pairs bitwise coincident
        const Vector<Scalar> mid = (yi + yj) / Scalar(2);
        out.config.row(i) = mid.transpose();
        out.config.row(j) = mid.transpose();
      } else {
        out.config.row(i) = (yi - move).transpose();
        out.config.row(j) = (yj + move).transpose();
      }
      max_change = std::max(max_change, (move - corr).norm());
      corr = move;
    }
    out.cycles = cycle;
    out.max_violation = max_violation(out.config, constraints);
    if (out.max_violation <= scaled_tol && max_change <= scaled_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

template <typename Scalar, typename Derived>
Configuration<Scalar> dykstra_project(const Eigen::MatrixBase<Derived>& config,
                                      const ConstraintSet<Scalar>& constraints, Scalar tol,
                                      Index max_cycles) {
  DykstraResult<Scalar> r = dykstra_project_report(config, constraints, tol, max_cycles);
  if (!r.converged) throw MaxCyclesExceeded<Scalar>(std::move(r));
  return std::move(r.config);
}

struct AleParams {
  double lipschitz_k = 1.0;
  double dykstra_tol = 1e-9;
  Index dykstra_max_cycles = 500;
  double outer_tol = 1e-9;
  Index outer_max_iters = 5000;
  /// cap Dykstra at min(dykstra_max_cycles, 10 + outer iteration) cycles
  bool approximate_schedule = false;
  /// start each projection from the previous projection's corrections
  bool warm_start = true;
};

template <typename Scalar = double>
struct AleReport {
  Configuration<Scalar> config;
  /// stress of the projected initial configuration, then one per iteration
  std::vector<Scalar> stress_trace;
  std::vector<Scalar> max_violation_trace;
  Index outer_iterations = 0;
  /// entry 0 is the projection of the initial configuration
  std::vector<Index> dykstra_cycles_per_iter;
  Termination termination = Termination::MaxIterations;
  /// projections that ran out of cycles; their last iterate was used
  Index incomplete_projections = 0;
  Scalar last_step_laplacian = 0;
  ConstraintSet<Scalar> constraints;

  Scalar final_stress() const { return stress_trace.back(); }
  Scalar final_violation() const { return max_violation_trace.back(); }
};

/// Approximate Lipschitz embedding: projected Guttman iterations
/// Z <- P(Gamma(Z)) with caps K * delta_ij, P computed by Dykstra.
///
/// On centered configurations the Frobenius projection coincides with the
/// projection in the L-seminorm when weights are uniform, which is the case
/// the majorization descent argument covers.
template <typename Scalar, typename Derived>
AleReport<Scalar> solve_ale(const GuttmanOperator<Scalar>& op,
                            const DissimilarityMatrix<Scalar>& delta,
                            const Eigen::MatrixBase<Derived>& init, const AleParams& params) {
  if (!(params.lipschitz_k >= 0) || !(params.dykstra_tol > 0) || !(params.outer_tol > 0) ||
      params.dykstra_max_cycles < 1 || params.outer_max_iters < 1)
    throw Error(ErrorCode::InvalidArgument, "invalid ALE parameters");
  if (delta.size() != op.size() || init.rows() != op.size())
    throw Error(ErrorCode::DimensionMismatch, "solve_ale");

  AleReport<Scalar> report;
  report.constraints = ConstraintSet<Scalar>::lipschitz(delta, Scalar(params.lipschitz_k));
  const auto& caps = report.constraints;
  const Scalar dtol = Scalar(params.dykstra_tol);

  Matrix<Scalar> corrections;
  bool projected = true;
  auto project = [&](const Configuration<Scalar>& z, Index outer) {
    Index budget = params.dykstra_max_cycles;
    if (params.approximate_schedule) budget = std::min(budget, Index(10) + outer);
    DykstraResult<Scalar> r =
        dykstra_project_report(z, caps, dtol, budget, params.warm_start ? &corrections : nullptr);
    projected = r.converged;
    if (!r.converged) ++report.incomplete_projections;
    report.dykstra_cycles_per_iter.push_back(r.cycles);
    report.max_violation_trace.push_back(r.max_violation);
    return std::move(r.config);
  };

  Configuration<Scalar> z = init;
  z.rowwise() -= z.colwise().mean();
  z = project(z, 0);
  Scalar stress = raw_stress(delta, op.weights(), z);
  report.stress_trace.push_back(stress);
  for (Index k = 1; k <= params.outer_max_iters; ++k) {
    Configuration<Scalar> next = project(op.apply(delta, z), k);
    const Scalar next_stress = raw_stress(delta, op.weights(), next);
    report.stress_trace.push_back(next_stress);
    report.last_step_laplacian = laplacian_quadratic(op.laplacian(), next - z);
    report.outer_iterations = k;
    const Scalar rel = (stress - next_stress) / std::max(stress, Scalar(1e-30));
    z = std::move(next);
    stress = next_stress;
    // a stress change across an unfinished projection says nothing about convergence
    if (projected && rel < Scalar(params.outer_tol)) {
      report.termination = Termination::Converged;
      break;
    }
  }
  report.config = std::move(z);
  return report;
}

template <typename Scalar, typename Derived>
AleReport<Scalar> solve_ale(const DissimilarityMatrix<Scalar>& delta,
                            const WeightMatrix<Scalar>& weights,
                            const Eigen::MatrixBase<Derived>& init, const AleParams& params) {
  const GuttmanOperator<Scalar> op(weights);
  return solve_ale(op, delta, init, params);
}

}  // namespace smds
