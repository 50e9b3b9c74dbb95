#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "smds/types.hpp"

namespace smds {

/// Symmetric distance on manifold points. The Lipschitz guarantees below
/// hold only when this is a true metric.
template <typename Point, typename Scalar = double>
using ReferenceMetric = std::function<Scalar(const Point&, const Point&)>;

/// Accepted relative excess of anchor differences over c * metric before
/// construction fails; smaller excesses inflate c instead.
inline constexpr double kAnchorInflationLimit = 1e-6;

/// Raised when anchor values break the per-component Lipschitz condition.
class LipschitzViolationError : public Error {
 public:
  LipschitzViolationError(Index i, Index j, Index component, double ratio)
      : Error(ErrorCode::LipschitzViolation,
              "anchors " + std::to_string(i) + "," + std::to_string(j) + " component " +
                  std::to_string(component) + " ratio " + std::to_string(ratio)),
        i_(i),
        j_(j),
        component_(component),
        ratio_(ratio) {}

  Index first() const noexcept { return i_; }
  Index second() const noexcept { return j_; }
  Index component() const noexcept { return component_; }
  /// |v_i - v_j| / (c * metric(m_i, m_j)) for the worst offender
  double ratio() const noexcept { return ratio_; }

 private:
  Index i_, j_, component_;
  double ratio_;
};

/// Max-of-downward-cones extension of anchor values:
///   f_l(m) = max_k ( values(k, l) - c * metric(m, m_k) ).
///
/// Each component reproduces its anchors and is c-Lipschitz, so the vector
/// map is c*sqrt(d)-Lipschitz. With `central` the value is instead the
/// average of that lower envelope and the min-of-upward-cones upper one,
/// which keeps both properties.
template <typename Point, typename Scalar = double>
class LipschitzInterpolant {
 public:
  LipschitzInterpolant(std::vector<Point> anchors, Matrix<Scalar> values, Scalar c,
                       ReferenceMetric<Point, Scalar> metric, bool central = false)
      : anchors_(std::move(anchors)),
        values_(std::move(values)),
        requested_c_(c),
        c_(c),
        metric_(std::move(metric)),
        central_(central) {
    if (static_cast<Index>(anchors_.size()) != values_.rows() || values_.rows() == 0)
      throw Error(ErrorCode::DimensionMismatch, "anchors and values disagree");
    if (!(c > Scalar(0)) || !std::isfinite(c))
      throw Error(ErrorCode::InvalidArgument, "Lipschitz constant must be positive");
    validate_anchors();
  }

  Index anchor_count() const { return values_.rows(); }
  Index dim() const { return values_.cols(); }
  const std::vector<Point>& anchors() const { return anchors_; }
  const Matrix<Scalar>& values() const { return values_; }
  bool central() const { return central_; }

  /// Constant actually used, >= the requested one.
  Scalar constant() const { return c_; }
  Scalar requested_constant() const { return requested_c_; }
  Scalar inflation() const { return c_ / requested_c_; }

  Vector<Scalar> evaluate(const Point& m) const {
    const Index d = dim();
    Vector<Scalar> lower = Vector<Scalar>::Constant(d, -std::numeric_limits<Scalar>::infinity());
    Vector<Scalar> upper = Vector<Scalar>::Constant(d, std::numeric_limits<Scalar>::infinity());
    for (Index k = 0; k < anchor_count(); ++k) {
      const Scalar reach = c_ * metric_(m, anchors_[static_cast<std::size_t>(k)]);
      for (Index l = 0; l < d; ++l) {
        lower(l) = std::max(lower(l), values_(k, l) - reach);
        upper(l) = std::min(upper(l), values_(k, l) + reach);
      }
    }
    if (!central_) return lower;
    return (lower + upper) / Scalar(2);
  }

  /// ||F(m1) - F(m2)||, a Euclidean pseudometric on manifold points.
  Scalar pseudometric(const Point& m1, const Point& m2) const {
    return (evaluate(m1) - evaluate(m2)).norm();
  }

  Scalar metric(const Point& a, const Point& b) const { return metric_(a, b); }

 private:
  void validate_anchors() {
    double worst = 0;
    Index wi = 0, wj = 0, wl = 0;
    for (Index i = 0; i < anchor_count(); ++i) {
      for (Index j = i + 1; j < anchor_count(); ++j) {
        const Scalar dist =
            metric_(anchors_[static_cast<std::size_t>(i)], anchors_[static_cast<std::size_t>(j)]);
        for (Index l = 0; l < dim(); ++l) {
          const Scalar gap = std::abs(values_(i, l) - values_(j, l));
          if (gap == Scalar(0)) continue;
          const double ratio = dist > Scalar(0) ? double(gap / (requested_c_ * dist))
                                                : std::numeric_limits<double>::infinity();
          if (ratio > worst) {
            worst = ratio;
            wi = i;
            wj = j;
            wl = l;
          }
        }
      }
    }
    if (worst > 1.0 + kAnchorInflationLimit) throw LipschitzViolationError(wi, wj, wl, worst);
    if (worst > 1.0) c_ = requested_c_ * Scalar(worst);
  }

  std::vector<Point> anchors_;
  Matrix<Scalar> values_;
  Scalar requested_c_;
  Scalar c_;
  ReferenceMetric<Point, Scalar> metric_;
  bool central_;
};

template <typename Point, typename Scalar>
LipschitzInterpolant<Point, Scalar> build_interpolant(std::vector<Point> anchors,
                                                     Matrix<Scalar> values, Scalar c,
                                                     ReferenceMetric<Point, Scalar> metric,
                                                     bool central = false) {
  return LipschitzInterpolant<Point, Scalar>(std::move(anchors), std::move(values), c,
                                             std::move(metric), central);
}

}  // namespace smds
