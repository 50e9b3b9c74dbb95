#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "smds/interp.hpp"
#include "support.hpp"

using namespace smds;
using smds::testing::Mat;

namespace {

const ReferenceMetric<double> line = [](const double& a, const double& b) { return std::abs(a - b); };

const ReferenceMetric<double> arc = [](const double& a, const double& b) {
  const double t = std::fmod(std::abs(a - b), 2 * std::numbers::pi);
  return std::min(t, 2 * std::numbers::pi - t);
};

/// Anchors on the circle with values from a 1-Lipschitz embedding: the
/// chord map scaled so each coordinate is c-Lipschitz in arc length.
LipschitzInterpolant<double> circle_interpolant(Index n, double c, bool central,
                                                std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 2 * std::numbers::pi);
  std::vector<double> anchors;
  Mat values(n, 2);
  for (Index k = 0; k < n; ++k) {
    anchors.push_back(u(rng));
    values(k, 0) = c * std::cos(anchors.back());
    values(k, 1) = c * std::sin(anchors.back());
  }
  return build_interpolant(anchors, values, c, arc, central);
}

}  // namespace

TEST_CASE("one anchor gives one cone") {
  Mat v(1, 1);
  v << 5;
  const auto f = build_interpolant<double, double>({0.25}, v, 1.0, line);
  for (const double m : {0.25, 0.0, 1.0, 3.5}) CHECK(f.evaluate(m)(0) == 5 - std::abs(m - 0.25));
}

TEST_CASE("two cones reproduce the identity on [0, 1]") {
  Mat v(2, 1);
  v << 0, 1;
  const auto f = build_interpolant<double, double>({0.0, 1.0}, v, 1.0, line);
  CHECK(f.evaluate(0.5)(0) == doctest::Approx(0.5).epsilon(1e-15));
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    CHECK(std::abs(f.evaluate(x)(0) - x) < 1e-15);
  }
  CHECK(f.pseudometric(0.3, 0.3) == 0);
  CHECK(f.pseudometric(0.0, 1.0) == 1);
}

TEST_CASE("anchor violations are rejected or absorbed") {
  Mat v(2, 1);
  v << 0, 10;
  try {
    build_interpolant<double, double>({0.0, 1.0}, v, 1.0, line);
    FAIL("expected a violation");
  } catch (const LipschitzViolationError& e) {
    CHECK(e.code() == ErrorCode::LipschitzViolation);
    CHECK(e.first() == 0);
    CHECK(e.second() == 1);
    CHECK(e.component() == 0);
    CHECK(e.ratio() == doctest::Approx(10));
  }

  v << 0, 1 + 5e-7;
  const auto f = build_interpolant<double, double>({0.0, 1.0}, v, 1.0, line);
  CHECK(f.requested_constant() == 1);
  CHECK(f.constant() == doctest::Approx(1 + 5e-7).epsilon(1e-12));
  CHECK(f.inflation() > 1);
  CHECK(f.evaluate(1.0)(0) == v(1, 0));

  v << 0, 0.5;
  CHECK(build_interpolant<double, double>({0.0, 1.0}, v, 1.0, line).inflation() == 1);

  // coincident anchors must carry identical values
  v << 1, 2;
  const std::vector<double> same{0.5, 0.5}, single{0.5}, ends{0.0, 1.0};
  CHECK_THROWS_AS(build_interpolant(same, v, 1.0, line), LipschitzViolationError);
  CHECK_THROWS_AS(build_interpolant(single, v, 1.0, line), Error);
  CHECK_THROWS_AS(build_interpolant(ends, v, 0.0, line), Error);
}

TEST_CASE("central option averages the two envelopes") {
  Mat v(2, 1);
  v << 0, 0.5;
  const auto low = build_interpolant<double, double>({0.0, 1.0}, v, 1.0, line);
  const auto mid = build_interpolant<double, double>({0.0, 1.0}, v, 1.0, line, true);
  // lower envelope max(-x, x - 0.5), upper min(x, 1.5 - x)
  CHECK(low.evaluate(0.25)(0) == doctest::Approx(-0.25));
  CHECK(mid.evaluate(0.25)(0) == doctest::Approx(0.0));
  CHECK(mid.evaluate(0.5)(0) == doctest::Approx(0.25));
  CHECK(mid.evaluate(0.0)(0) == 0);
  CHECK(mid.evaluate(1.0)(0) == 0.5);
}

TEST_CASE("circle interpolants: exact at anchors, Lipschitz everywhere") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 2 * std::numbers::pi);
  for (const bool central : {false, true}) {
    const double c = 1.3;
    const auto f = circle_interpolant(40, c, central, rng);
    CHECK(f.inflation() == 1);
    for (Index k = 0; k < f.anchor_count(); ++k)
      CHECK((f.evaluate(f.anchors()[static_cast<std::size_t>(k)]).transpose() - f.values().row(k))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    for (Index i = 0; i < f.anchor_count(); ++i)
      for (Index j = 0; j < f.anchor_count(); ++j)
        CHECK(std::abs(f.pseudometric(f.anchors()[static_cast<std::size_t>(i)],
                                      f.anchors()[static_cast<std::size_t>(j)]) -
                       (f.values().row(i) - f.values().row(j)).norm()) < 1e-12);

    double comp = 0, vec = 0, prod = 0;
    for (int t = 0; t < 1000; ++t) {
      const double a = u(rng), b = u(rng), a2 = u(rng), b2 = u(rng);
      const double dist = arc(a, b);
      if (dist == 0) continue;
      const Eigen::VectorXd fa = f.evaluate(a), fb = f.evaluate(b);
      comp = std::max(comp, (fa - fb).cwiseAbs().maxCoeff() / dist);
      vec = std::max(vec, (fa - fb).norm() / dist);
      const double moved = std::hypot(arc(a, a2), arc(b, b2));
      prod = std::max(prod, std::abs(f.pseudometric(a, b) - f.pseudometric(a2, b2)) / moved);
    }
    CHECK(comp <= c + 1e-9);
    CHECK(vec <= c * std::sqrt(2.0) + 1e-9);
    CHECK(prod <= c * std::sqrt(6.0) + 1e-9);
  }
}

TEST_CASE("vector-valued anchors on a line") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> anchors;
  Mat v(25, 3);
  for (Index k = 0; k < 25; ++k) {
    anchors.push_back(u(rng));
    v.row(k) << anchors.back(), 0.5 * anchors.back(), std::sin(anchors.back());
  }
  const auto f = build_interpolant(anchors, v, 1.0, line);
  CHECK(f.dim() == 3);
  for (int t = 0; t < 500; ++t) {
    const double a = u(rng), b = u(rng);
    CHECK((f.evaluate(a) - f.evaluate(b)).cwiseAbs().maxCoeff() <= std::abs(a - b) + 1e-12);
  }
}
