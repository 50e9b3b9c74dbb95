#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>

#include "smds/ale.hpp"
#include "smds/classical.hpp"
#include "smds/dissim.hpp"
#include "smds/geodesics.hpp"
#include "smds/interp.hpp"
#include "smds/stress.hpp"

/// Desk-scale experiments on synthetic manifolds with known metrics.
namespace smds::harness {

using Point = Eigen::VectorXd;
using Dissim = DissimilarityMatrix<double>;

enum class ManifoldKind { Interval, Circle, SwissRoll };

const char* to_string(ManifoldKind kind);
ManifoldKind parse_manifold(const std::string& name);

struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Interval;
  std::uint64_t seed = 0;
};

/// Points drawn uniformly in intrinsic coordinates.
///
/// Interval: x in [0,1] placed on an arc of radius 0.5 in the plane, so the
///   arc-length metric |x - y| is intrinsic but not ambient-Euclidean.
/// Circle: angle in [0, 2pi) on the unit circle, geodesic arc length.
/// SwissRoll: (arc length along the spiral, height) for the roll
///   (t cos t, h, t sin t), t in [1.5pi, 4.5pi], h in [0, 10]; flat metric.
struct ManifoldSample {
  std::vector<Point> intrinsic;
  Matrix<double> ambient;
};

ManifoldSample sample_manifold(ManifoldKind kind, Index n, std::mt19937_64& rng);
Point random_point(ManifoldKind kind, std::mt19937_64& rng);
double manifold_distance(ManifoldKind kind, const Point& a, const Point& b);
ReferenceMetric<Point> manifold_metric(ManifoldKind kind);
/// Embedding dimension used for each manifold: 1, 2, 2.
Index embedding_dim(ManifoldKind kind);
Dissim closed_form_dissimilarity(ManifoldKind kind, const std::vector<Point>& points);

/// Worst violation of symmetry, identity and the triangle inequality over
/// random triples. Zero for a metric.
double metric_axiom_defect(ManifoldKind kind, Index triples, std::mt19937_64& rng);

/// Graph neighborhood size used by the experiments: max(4, ceil(2 log n)).
Index knn_for_size(Index n);

// ---------------------------------------------------------------------------
// decrease lemma

struct DecreaseTrial {
  double delta, delta1, delta2, w1, w2, eps;
  Eigen::Vector2d z1, z2, z;
};

/// Left side minus right side of the two-point decrease inequality
///   sum_i w_i (|z_i - z| - delta_i)^2 - sum_i w_i (|z_i' - z| - delta_i)^2
///     >= (w1 + w2) eps^2
/// with z_1' = z_1 - eps u, z_2' = z_2 + eps u.
double decrease_slack(const DecreaseTrial& t);

/// Whether a trial meets the inequality's stated preconditions.
bool decrease_preconditions_hold(const DecreaseTrial& t);

struct DecreaseSampling {
  double delta_min = 0.0;
  double delta_max = 2.0;
  double weight_min = 0.1;
  double weight_max = 10.0;
};

struct DecreaseSummary {
  Index trials = 0;
  Index violations = 0;
  double min_slack = 0;
  std::optional<DecreaseTrial> worst;
  bool passed(double slack_tol = 1e-12) const { return min_slack >= -slack_tol; }
};

DecreaseSummary check_decrease_lemma(Index trials, std::uint64_t seed,
                                     const DecreaseSampling& sampling = {});

// ---------------------------------------------------------------------------
// bound on minimizer diameter

struct SixDeltaOptions {
  Index min_n = 3;
  Index max_n = 30;
  Index dim = 2;
  Index restarts = 5;
  double delta_max = 2.0;
  double slack = 1e-6;
  SolveOptions solve;
};

struct SixDeltaSummary {
  Index instances = 0;
  /// instances whose classical-init solution exceeded the bound
  Index local_excess = 0;
  /// instances still exceeding after multistart
  Index violations = 0;
  /// max over instances of (max embedded distance) / (max delta)
  double worst_ratio = 0;
};

/// Largest embedded distance of the lowest-stress solution among a
/// classical-MDS start and, when that one exceeds 6 * max(delta), up to
/// `restarts` random starts.
double six_delta_ratio(const Dissim& delta, const SixDeltaOptions& opts, std::mt19937_64& rng,
                       bool* needed_restart = nullptr);

SixDeltaSummary check_six_delta_bound(Index instances, std::uint64_t seed,
                                      const SixDeltaOptions& opts = {});

// ---------------------------------------------------------------------------
// fixed-n stability

struct StabilityPoint {
  Index k = 0;
  /// lp_discrepancy(Delta_k, Delta, 2)
  double perturbation = 0;
  /// lp_discrepancy(D(solution_k), D(solution_inf), 2)
  double discrepancy = 0;
};

/// Symmetric hollow noise with off-diagonal entries uniform in [-1, 1].
Matrix<double> symmetric_noise(Index n, std::mt19937_64& rng);

/// Solves Delta_k = max(0, Delta + (scale / k) E) for each k, all from the
/// classical-MDS start of Delta, and compares each solution's distances
/// with those of the unperturbed solve.
std::vector<StabilityPoint> fixed_n_stability(const Dissim& delta, const Matrix<double>& noise,
                                              double scale, const std::vector<Index>& ks,
                                              Index dim, const SolveOptions& opts = {});

std::vector<StabilityPoint> fixed_n_stability(const Dissim& delta, const Matrix<double>& noise,
                                              double scale, Index steps, Index dim,
                                              const SolveOptions& opts = {});

// ---------------------------------------------------------------------------
// consistency and interpolation trends

struct EmbedMode {
  bool ale = false;
  double k = 0;

  static EmbedMode unconstrained() { return {false, 0}; }
  static EmbedMode lipschitz(double k) { return {true, k}; }
  std::string name() const;
};

struct TrendReport {
  ManifoldKind manifold = ManifoldKind::Interval;
  EmbedMode mode;
  std::uint64_t seed = 0;
  double p = 2;
  std::vector<Index> sample_sizes;
  std::vector<double> lp_errors;
  std::vector<double> sup_errors;
  /// lp error after the optimal scalar alignment s >= 0
  std::vector<double> lp_errors_scaled;
  std::vector<double> ratio_bounds_R;
  std::vector<double> stress_final;
  std::vector<double> max_violation;
  std::vector<double> runtimes_ms;
  /// interpolation runs only: every Lipschitz check passed at this size
  std::vector<bool> lipschitz_ok;
};

struct ConsistencyOptions {
  /// use the closed-form metric as Delta_n instead of graph geodesics
  bool bypass_graph = false;
  SolveOptions solve;
  AleParams ale;
};

/// One seed of the consistency ladder. Embedded solutions are local
/// minimizers from a classical-MDS start; errors compare distance
/// matrices only. Throws DisconnectedGraphError naming the failing n.
TrendReport consistency_experiment(const ManifoldSpec& manifold, const std::vector<Index>& sizes,
                                   const EmbedMode& mode, double p,
                                   const ConsistencyOptions& opts = {});

struct LipschitzCheck {
  double anchor_error = 0;
  /// max sampled ratio divided by its bound: c, c sqrt(d), c sqrt(3d)
  double component_ratio = 0;
  double vector_ratio = 0;
  double product_ratio = 0;
  /// sup sampled pseudometric minus c * sampled diameter
  double bound_excess = 0;
  double c = 0;
  Index dim = 0;

  bool passed(double tol = 1e-9) const;
};

/// Monte Carlo check of the interpolant's Lipschitz guarantees over
/// `samples` random pairs and `samples` random 4-tuples.
LipschitzCheck check_interpolant(const LipschitzInterpolant<Point>& interp, ManifoldKind kind,
                                 Index samples, std::mt19937_64& rng);

struct InterpolantOptions {
  Index lipschitz_samples = 2000;
  SolveOptions solve;
  AleParams ale;
};

/// Per size: ALE embed, interpolate with c = K R_n against the closed-form
/// metric, evaluate the interpolated pseudometric on fixed probe pairs.
/// sup_errors[i] is the sup over probes of the change from size i-1 (NaN
/// at i = 0); lp_errors[i] is the probe L^p error against the true metric.
TrendReport uniform_interpolant_experiment(const ManifoldSpec& manifold,
                                           const std::vector<Index>& sizes, double k,
                                           Index probe_count, const InterpolantOptions& opts = {});

/// Median of the values; throws on empty input.
double median(std::vector<double> v);

/// Header plus one row per (report, size):
/// manifold,mode,n,seed,p,lp_error,sup_error,ratio_R,stress_final,max_violation,wall_ms
void write_trend_csv(std::ostream& out, const std::vector<TrendReport>& reports);

}  // namespace smds::harness
