#include "smds/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace smds::harness {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kArcRadius = 0.5;
constexpr double kRollStart = 1.5 * std::numbers::pi;
constexpr double kRollEnd = 4.5 * std::numbers::pi;
constexpr double kRollHeight = 10.0;

double spiral_arclength(double t) { return 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t)); }

// Inverse of spiral_arclength on [kRollStart, kRollEnd] by Newton's method.
double spiral_parameter(double s) {
  double t = kRollStart + (s - spiral_arclength(kRollStart)) / std::sqrt(1.0 + kRollStart * kRollStart);
  for (int it = 0; it < 50; ++it) {
    const double step = (spiral_arclength(t) - s) / std::sqrt(1.0 + t * t);
    t -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, t)) break;
  }
  return t;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::mt19937_64 cell_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

const char* to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Interval: return "interval";
    case ManifoldKind::Circle: return "circle";
    case ManifoldKind::SwissRoll: return "swissroll";
  }
  return "unknown";
}

ManifoldKind parse_manifold(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "interval") return ManifoldKind::Interval;
  if (lower == "circle") return ManifoldKind::Circle;
  if (lower == "swissroll" || lower == "swiss_roll" || lower == "swiss-roll")
    return ManifoldKind::SwissRoll;
  throw Error(ErrorCode::InvalidArgument, "unknown manifold '" + name + "'");
}

Point random_point(ManifoldKind kind, std::mt19937_64& rng) {
  switch (kind) {
    case ManifoldKind::Interval: return Point::Constant(1, uniform(rng, 0.0, 1.0));
    case ManifoldKind::Circle: return Point::Constant(1, uniform(rng, 0.0, kTwoPi));
    case ManifoldKind::SwissRoll: {
      Point p(2);
      p(0) = uniform(rng, spiral_arclength(kRollStart), spiral_arclength(kRollEnd));
      p(1) = uniform(rng, 0.0, kRollHeight);
      return p;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown manifold");
}

ManifoldSample sample_manifold(ManifoldKind kind, Index n, std::mt19937_64& rng) {
  ManifoldSample s;
  s.intrinsic.reserve(static_cast<std::size_t>(n));
  const Index ambient_dim = kind == ManifoldKind::SwissRoll ? 3 : 2;
  s.ambient.resize(n, ambient_dim);
  for (Index i = 0; i < n; ++i) {
    Point p = random_point(kind, rng);
    switch (kind) {
      case ManifoldKind::Interval: {
        const double angle = p(0) / kArcRadius;
        s.ambient.row(i) << kArcRadius * std::cos(angle), kArcRadius * std::sin(angle);
        break;
      }
      case ManifoldKind::Circle:
        s.ambient.row(i) << std::cos(p(0)), std::sin(p(0));
        break;
      case ManifoldKind::SwissRoll: {
        const double t = spiral_parameter(p(0));
        s.ambient.row(i) << t * std::cos(t), p(1), t * std::sin(t);
        break;
      }
    }
    s.intrinsic.push_back(std::move(p));
  }
  return s;
}

double manifold_distance(ManifoldKind kind, const Point& a, const Point& b) {
  switch (kind) {
    case ManifoldKind::Interval: return std::abs(a(0) - b(0));
    case ManifoldKind::Circle: {
      const double d = std::fmod(std::abs(a(0) - b(0)), kTwoPi);
      return std::min(d, kTwoPi - d);
    }
    case ManifoldKind::SwissRoll: return (a - b).norm();
  }
  throw Error(ErrorCode::InvalidArgument, "unknown manifold");
}

ReferenceMetric<Point> manifold_metric(ManifoldKind kind) {
  return [kind](const Point& a, const Point& b) { return manifold_distance(kind, a, b); };
}

Index embedding_dim(ManifoldKind kind) { return kind == ManifoldKind::Interval ? 1 : 2; }

Dissim closed_form_dissimilarity(ManifoldKind kind, const std::vector<Point>& points) {
  const Index n = static_cast<Index>(points.size());
  Matrix<double> m = Matrix<double>::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      m(i, j) = m(j, i) = manifold_distance(kind, points[static_cast<std::size_t>(i)],
                                            points[static_cast<std::size_t>(j)]);
  return Dissim::unchecked(std::move(m));
}

double metric_axiom_defect(ManifoldKind kind, Index triples, std::mt19937_64& rng) {
  double worst = 0;
  for (Index t = 0; t < triples; ++t) {
    const Point a = random_point(kind, rng), b = random_point(kind, rng), c = random_point(kind, rng);
    const double ab = manifold_distance(kind, a, b), ba = manifold_distance(kind, b, a);
    const double bc = manifold_distance(kind, b, c), ac = manifold_distance(kind, a, c);
    worst = std::max({worst, std::abs(ab - ba), manifold_distance(kind, a, a), ac - ab - bc,
                      -ab});
  }
  return worst;
}

Index knn_for_size(Index n) {
  return std::max<Index>(4, static_cast<Index>(std::ceil(2.0 * std::log(double(n)))));
}

// ---------------------------------------------------------------------------

double decrease_slack(const DecreaseTrial& t) {
  const Eigen::Vector2d gap = t.z1 - t.z2;
  const Eigen::Vector2d u = gap / gap.norm();
  const Eigen::Vector2d z1p = t.z1 - t.eps * u;
  const Eigen::Vector2d z2p = t.z2 + t.eps * u;
  auto sq = [](double x) { return x * x; };
  const double before =
      t.w1 * sq((t.z1 - t.z).norm() - t.delta1) + t.w2 * sq((t.z2 - t.z).norm() - t.delta2);
  const double after =
      t.w1 * sq((z1p - t.z).norm() - t.delta1) + t.w2 * sq((z2p - t.z).norm() - t.delta2);
  return before - after - (t.w1 + t.w2) * t.eps * t.eps;
}

bool decrease_preconditions_hold(const DecreaseTrial& t) {
  const double rho2 = std::max(t.w1, t.w2) / std::min(t.w1, t.w2);
  const double gap = (t.z1 - t.z2).norm();
  return t.delta1 >= 0 && t.delta1 <= t.delta && t.delta2 >= 0 && t.delta2 <= t.delta &&
         t.w1 > 0 && t.w2 > 0 && gap > 3.0 * t.delta * (1.0 + rho2) &&
         (t.z1 - t.z).norm() <= gap && (t.z2 - t.z).norm() <= gap && t.eps > 0 &&
         t.eps <= std::sqrt(t.delta);
}

DecreaseSummary check_decrease_lemma(Index trials, std::uint64_t seed,
                                     const DecreaseSampling& sampling) {
  std::mt19937_64 rng(seed);
  DecreaseSummary out;
  out.min_slack = std::numeric_limits<double>::infinity();
  while (out.trials < trials) {
    DecreaseTrial t{};
    do {
      t.delta = uniform(rng, sampling.delta_min, sampling.delta_max);
    } while (!(t.delta > 0));
    t.delta1 = uniform(rng, 0.0, t.delta);
    t.delta2 = uniform(rng, 0.0, t.delta);
    t.w1 = uniform(rng, sampling.weight_min, sampling.weight_max);
    t.w2 = uniform(rng, sampling.weight_min, sampling.weight_max);
    const double rho2 = std::max(t.w1, t.w2) / std::min(t.w1, t.w2);
    const double threshold = 3.0 * t.delta * (1.0 + rho2);
    const double gap = std::nextafter(threshold * (1.0 + uniform(rng, 0.0, 2.0)),
                                      std::numeric_limits<double>::infinity());
    const double angle = uniform(rng, 0.0, kTwoPi);
    const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
    const Eigen::Vector2d mid(uniform(rng, -10.0, 10.0), uniform(rng, -10.0, 10.0));
    t.z1 = mid + 0.5 * gap * dir;
    t.z2 = mid - 0.5 * gap * dir;
    do {
      t.z = mid + Eigen::Vector2d(uniform(rng, -gap, gap), uniform(rng, -gap, gap));
    } while ((t.z1 - t.z).norm() > gap || (t.z2 - t.z).norm() > gap);
    t.eps = std::sqrt(t.delta) * (1.0 - uniform(rng, 0.0, 1.0));
    if (!decrease_preconditions_hold(t)) continue;

    ++out.trials;
    const double slack = decrease_slack(t);
    if (slack < -1e-12) ++out.violations;
    if (slack < out.min_slack) {
      out.min_slack = slack;
      out.worst = t;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

double six_delta_ratio(const Dissim& delta, const SixDeltaOptions& opts, std::mt19937_64& rng,
                       bool* needed_restart) {
  const Index n = delta.size();
  const double max_delta = delta.max_entry();
  const GuttmanOperator<double> op(WeightMatrix<double>::uniform(n));
  auto diameter = [](const Configuration<double>& z) {
    return euclidean_distances(z).max_entry();
  };

  const auto init = classical_mds(delta, std::min(opts.dim, n - 1)).config;
  auto best = solve_unconstrained(op, delta, init, opts.solve);
  const double bound = 6.0 * max_delta + opts.slack;
  if (needed_restart) *needed_restart = false;
  if (diameter(best.config) > bound) {
    if (needed_restart) *needed_restart = true;
    std::normal_distribution<double> gauss(0.0, std::max(max_delta, 1e-12));
    for (Index r = 0; r < opts.restarts; ++r) {
      Configuration<double> start(n, init.cols());
      for (Index i = 0; i < start.size(); ++i) start.data()[i] = gauss(rng);
      auto trial = solve_unconstrained(op, delta, start, opts.solve);
      if (trial.final_stress() < best.final_stress()) best = std::move(trial);
    }
  }
  return max_delta > 0 ? diameter(best.config) / max_delta : 0.0;
}

SixDeltaSummary check_six_delta_bound(Index instances, std::uint64_t seed,
                                      const SixDeltaOptions& opts) {
  std::mt19937_64 rng(seed);
  SixDeltaSummary out;
  for (Index k = 0; k < instances; ++k) {
    const Index n = std::uniform_int_distribution<Index>(opts.min_n, opts.max_n)(rng);
    Matrix<double> raw = Matrix<double>::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) raw(i, j) = raw(j, i) = uniform(rng, 0.0, opts.delta_max);
    const Dissim delta = validate_dissimilarity(raw);
    bool restarted = false;
    const double ratio = six_delta_ratio(delta, opts, rng, &restarted);
    ++out.instances;
    if (restarted) ++out.local_excess;
    if (ratio * delta.max_entry() > 6.0 * delta.max_entry() + opts.slack) ++out.violations;
    out.worst_ratio = std::max(out.worst_ratio, ratio);
  }
  return out;
}

// ---------------------------------------------------------------------------

Matrix<double> symmetric_noise(Index n, std::mt19937_64& rng) {
  Matrix<double> e = Matrix<double>::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) e(i, j) = e(j, i) = uniform(rng, -1.0, 1.0);
  return e;
}

std::vector<StabilityPoint> fixed_n_stability(const Dissim& delta, const Matrix<double>& noise,
                                              double scale, const std::vector<Index>& ks,
                                              Index dim, const SolveOptions& opts) {
  const Index n = delta.size();
  if (noise.rows() != n || noise.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "noise matrix");
  const GuttmanOperator<double> op(WeightMatrix<double>::uniform(n));
  const auto init = classical_mds(delta, dim).config;
  const Dissim limit = euclidean_distances(solve_unconstrained(op, delta, init, opts).config);

  std::vector<StabilityPoint> out;
  for (const Index k : ks) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    Matrix<double> perturbed = (delta.matrix() + (scale / double(k)) * noise).cwiseMax(0.0);
    perturbed.diagonal().setZero();
    const Dissim delta_k = Dissim::unchecked(std::move(perturbed));
    const auto sol = solve_unconstrained(op, delta_k, init, opts);
    out.push_back({k, lp_discrepancy(delta_k, delta, 2.0),
                   lp_discrepancy(euclidean_distances(sol.config), limit, 2.0)});
  }
  return out;
}

std::vector<StabilityPoint> fixed_n_stability(const Dissim& delta, const Matrix<double>& noise,
                                              double scale, Index steps, Index dim,
                                              const SolveOptions& opts) {
  if (steps < 2) throw Error(ErrorCode::InvalidArgument, "steps must be >= 2");
  std::vector<Index> ks;
  for (Index k = 1; k <= steps; ++k) ks.push_back(k);
  return fixed_n_stability(delta, noise, scale, ks, dim, opts);
}

// ---------------------------------------------------------------------------

std::string EmbedMode::name() const {
  if (!ale) return "unconstrained";
  std::ostringstream os;
  os << "ale(" << k << ")";
  return os.str();
}

namespace {

struct EmbeddedCell {
  ManifoldSample sample;
  Dissim truth;
  Dissim delta;
  double ratio_r = 1;
  Configuration<double> config;
  double stress = 0;
  double violation = 0;
};

EmbeddedCell embed_cell(ManifoldKind kind, Index n, std::mt19937_64& rng, const EmbedMode& mode,
                        bool bypass_graph, const SolveOptions& solve, AleParams ale) {
  EmbeddedCell cell;
  cell.sample = sample_manifold(kind, n, rng);
  cell.truth = closed_form_dissimilarity(kind, cell.sample.intrinsic);
  if (bypass_graph) {
    cell.delta = cell.truth;
  } else {
    const auto graph = build_graph(cell.sample.ambient, GraphRule::knn(knn_for_size(n)));
    cell.delta = shortest_path_dissimilarity(graph);
  }
  cell.ratio_r = std::exp(ratio_metric(cell.delta, cell.truth));

  const GuttmanOperator<double> op(WeightMatrix<double>::uniform(n));
  const auto init = classical_mds(cell.delta, embedding_dim(kind)).config;
  if (mode.ale) {
    ale.lipschitz_k = mode.k;
    auto r = solve_ale(op, cell.delta, init, ale);
    cell.stress = r.final_stress();
    cell.violation = r.final_violation();
    cell.config = std::move(r.config);
  } else {
    auto r = solve_unconstrained(op, cell.delta, init, solve);
    cell.stress = r.final_stress();
    cell.config = std::move(r.config);
  }
  return cell;
}

}  // namespace

TrendReport consistency_experiment(const ManifoldSpec& manifold, const std::vector<Index>& sizes,
                                   const EmbedMode& mode, double p,
                                   const ConsistencyOptions& opts) {
  if (!std::is_sorted(sizes.begin(), sizes.end()) ||
      std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end())
    throw Error(ErrorCode::InvalidArgument, "sizes must be strictly increasing");
  TrendReport report;
  report.manifold = manifold.kind;
  report.mode = mode;
  report.seed = manifold.seed;
  report.p = p;
  for (const Index n : sizes) {
    const auto start = std::chrono::steady_clock::now();
    auto rng = cell_rng(manifold.seed, static_cast<std::uint64_t>(n), 1);
    EmbeddedCell cell;
    try {
      cell = embed_cell(manifold.kind, n, rng, mode, opts.bypass_graph, opts.solve, opts.ale);
    } catch (const DisconnectedGraphError& e) {
      throw Error(ErrorCode::DisconnectedGraph,
                  "n=" + std::to_string(n) + ": " + std::to_string(e.components().size()) +
                      " components");
    }
    const Dissim embedded = euclidean_distances(cell.config);
    const double dd = embedded.matrix().squaredNorm();
    const double s = dd > 0 ? std::max(0.0, embedded.matrix().cwiseProduct(cell.truth.matrix()).sum() / dd)
                            : 0.0;
    const Dissim scaled = Dissim::unchecked(s * embedded.matrix());

    report.sample_sizes.push_back(n);
    report.lp_errors.push_back(lp_discrepancy(embedded, cell.truth, p));
    report.sup_errors.push_back(sup_discrepancy(embedded, cell.truth));
    report.lp_errors_scaled.push_back(lp_discrepancy(scaled, cell.truth, p));
    report.ratio_bounds_R.push_back(cell.ratio_r);
    report.stress_final.push_back(cell.stress);
    report.max_violation.push_back(cell.violation);
    report.runtimes_ms.push_back(elapsed_ms(start));
  }
  return report;
}

bool LipschitzCheck::passed(double tol) const {
  const double d = double(dim);
  return anchor_error <= 1e-12 && component_ratio <= c + tol &&
         vector_ratio <= c * std::sqrt(d) + tol && product_ratio <= c * std::sqrt(3.0 * d) + tol &&
         bound_excess <= tol;
}

LipschitzCheck check_interpolant(const LipschitzInterpolant<Point>& interp, ManifoldKind kind,
                                 Index samples, std::mt19937_64& rng) {
  LipschitzCheck out;
  out.c = interp.constant();
  out.dim = interp.dim();
  for (Index k = 0; k < interp.anchor_count(); ++k) {
    const Vector<double> v = interp.evaluate(interp.anchors()[static_cast<std::size_t>(k)]);
    out.anchor_error =
        std::max(out.anchor_error, (v - interp.values().row(k).transpose()).cwiseAbs().maxCoeff());
  }
  double sup_pseudo = 0, diameter = 0;
  for (Index s = 0; s < samples; ++s) {
    const Point a = random_point(kind, rng), b = random_point(kind, rng);
    const double dist = manifold_distance(kind, a, b);
    const Vector<double> fa = interp.evaluate(a), fb = interp.evaluate(b);
    sup_pseudo = std::max(sup_pseudo, (fa - fb).norm());
    diameter = std::max(diameter, dist);
    if (dist > 0) {
      out.component_ratio = std::max(out.component_ratio, (fa - fb).cwiseAbs().maxCoeff() / dist);
      out.vector_ratio = std::max(out.vector_ratio, (fa - fb).norm() / dist);
    }
  }
  out.bound_excess = sup_pseudo - out.c * std::sqrt(double(out.dim)) * diameter;
  for (Index s = 0; s < samples; ++s) {
    const Point a = random_point(kind, rng), b = random_point(kind, rng);
    const Point a2 = random_point(kind, rng), b2 = random_point(kind, rng);
    const double da = manifold_distance(kind, a, a2), db = manifold_distance(kind, b, b2);
    const double prod = std::sqrt(da * da + db * db);
    if (prod > 0) {
      const double change = std::abs(interp.pseudometric(a, b) - interp.pseudometric(a2, b2));
      out.product_ratio = std::max(out.product_ratio, change / prod);
    }
  }
  return out;
}

TrendReport uniform_interpolant_experiment(const ManifoldSpec& manifold,
                                           const std::vector<Index>& sizes, double k,
                                           Index probe_count, const InterpolantOptions& opts) {
  if (!std::is_sorted(sizes.begin(), sizes.end()))
    throw Error(ErrorCode::InvalidArgument, "sizes must be increasing");
  auto probe_rng = cell_rng(manifold.seed, 0, 2);
  std::vector<std::pair<Point, Point>> probes;
  for (Index i = 0; i < probe_count; ++i) {
    Point a = random_point(manifold.kind, probe_rng);
    Point b = random_point(manifold.kind, probe_rng);
    probes.emplace_back(std::move(a), std::move(b));
  }

  TrendReport report;
  report.manifold = manifold.kind;
  report.mode = EmbedMode::lipschitz(k);
  report.seed = manifold.seed;
  report.p = 2;
  std::vector<double> previous;
  for (const Index n : sizes) {
    const auto start = std::chrono::steady_clock::now();
    auto rng = cell_rng(manifold.seed, static_cast<std::uint64_t>(n), 3);
    EmbeddedCell cell = embed_cell(manifold.kind, n, rng, EmbedMode::lipschitz(k), false,
                                   opts.solve, opts.ale);
    const auto interp = build_interpolant<Point, double>(
        cell.sample.intrinsic, cell.config, k * cell.ratio_r, manifold_metric(manifold.kind));
    const LipschitzCheck check = check_interpolant(interp, manifold.kind, opts.lipschitz_samples, rng);

    std::vector<double> current;
    double lp = 0;
    for (const auto& [a, b] : probes) {
      const double value = interp.pseudometric(a, b);
      lp += std::pow(std::abs(value - manifold_distance(manifold.kind, a, b)), 2.0);
      current.push_back(value);
    }
    double change = std::numeric_limits<double>::quiet_NaN();
    if (!previous.empty()) {
      change = 0;
      for (std::size_t i = 0; i < current.size(); ++i)
        change = std::max(change, std::abs(current[i] - previous[i]));
    }
    previous = current;

    report.sample_sizes.push_back(n);
    report.lp_errors.push_back(probes.empty() ? 0.0 : std::sqrt(lp / double(probes.size())));
    report.sup_errors.push_back(change);
    report.lp_errors_scaled.push_back(report.lp_errors.back());
    report.ratio_bounds_R.push_back(cell.ratio_r);
    report.stress_final.push_back(cell.stress);
    report.max_violation.push_back(cell.violation);
    report.runtimes_ms.push_back(elapsed_ms(start));
    report.lipschitz_ok.push_back(check.passed());
  }
  return report;
}

double median(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorCode::InvalidArgument, "median of empty list");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void write_trend_csv(std::ostream& out, const std::vector<TrendReport>& reports) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "manifold,mode,n,seed,p,lp_error,sup_error,ratio_R,stress_final,max_violation,wall_ms\n";
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.sample_sizes.size(); ++i) {
      os << to_string(r.manifold) << ',' << r.mode.name() << ',' << r.sample_sizes[i] << ','
         << r.seed << ',' << r.p << ',' << r.lp_errors[i] << ',' << r.sup_errors[i] << ','
         << r.ratio_bounds_R[i] << ',' << r.stress_final[i] << ',' << r.max_violation[i] << ','
         << std::setprecision(6) << r.runtimes_ms[i] << std::setprecision(17) << '\n';
    }
  }
  out << os.str();
}

}  // namespace smds::harness
