#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "smds/classical.hpp"
#include "smds/stress.hpp"
#include "support.hpp"

using namespace smds;
using smds::testing::Mat;

TEST_CASE("colinear triple recovers (-1, 0, 1)") {
  Mat m(3, 3);
  m << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  const auto delta = validate_dissimilarity(m);
  const auto init = classical_mds(delta, 1);
  CHECK((euclidean_distances(init.config).matrix() - m).cwiseAbs().maxCoeff() < 1e-9);
  // first nonzero coordinate positive
  CHECK(init.config(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(init.config(1, 0)) < 1e-9);
  CHECK(init.config(2, 0) == doctest::Approx(-1.0).epsilon(1e-9));

  // eigen-oracle: B has eigenvalues {2, 0, 0} for this configuration
  CHECK(init.eigenvalues(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(init.eigenvalues(1)) < 1e-12);
  CHECK(std::abs(init.eigenvalues(2)) < 1e-12);
}

TEST_CASE("exact EDM recovery in its own dimension") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = testing::random_index(rng, 1, 3);
    const Index n = testing::random_index(rng, d + 2, 40);
    const Mat pts = testing::random_matrix(n, d, rng);
    const auto delta = euclidean_distances(pts);
    const auto init = classical_mds(delta, d);
    CHECK(lp_discrepancy(euclidean_distances(init.config), delta, 2.0) < 1e-8);
    CHECK(raw_stress(delta, WeightMatrix<double>::uniform(n), init.config) < 1e-10);
  }
}

TEST_CASE("all-zero dissimilarity") {
  const auto delta = DissimilarityMatrix<double>::unchecked(Mat::Zero(5, 5));
  const auto init = classical_mds(delta, 2);
  CHECK(init.config.isZero(0));
  CHECK(init.eigenvalues.isZero(0));
}

TEST_CASE("dimension checks") {
  std::mt19937_64 rng(2);
  const auto delta = testing::random_dissimilarity(4, rng);
  CHECK_NOTHROW(classical_mds(delta, 3));
  try {
    classical_mds(delta, 4);
    FAIL("expected DimensionTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionTooLarge);
  }
  CHECK_THROWS_AS(classical_mds(delta, 0), Error);
}

TEST_CASE("output structure on arbitrary dissimilarities") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = testing::random_index(rng, 3, 30);
    const Index d = testing::random_index(rng, 1, std::min<Index>(4, n - 1));
    const auto delta = testing::random_dissimilarity(n, rng);
    const auto init = classical_mds(delta, d);
    REQUIRE(init.eigenvalues.size() == n);
    for (Index i = 1; i < n; ++i) CHECK(init.eigenvalues(i) <= init.eigenvalues(i - 1));
    CHECK(init.config.colwise().mean().cwiseAbs().maxCoeff() < 1e-10);
    const Mat gram = init.config.transpose() * init.config;
    for (Index a = 0; a < d; ++a) {
      for (Index b = 0; b < d; ++b) {
        if (a != b) CHECK(std::abs(gram(a, b)) < 1e-8);
      }
      // column norm^2 equals its eigenvalue when positive, else zero
      const double expect = std::max(init.eigenvalues(a), 0.0);
      CHECK(std::abs(gram(a, a) - expect) < 1e-8 * (1 + expect));
    }
  }
}

TEST_CASE("columns for nonpositive eigenvalues are zero") {
  // four points on a line: B has rank one, so a 3-d request pads with zeros
  Mat pts(4, 1);
  pts << 0, 1, 3, 7;
  const auto init = classical_mds(euclidean_distances(pts), 3);
  CHECK(init.config.col(0).norm() > 1);
  for (Index c = 1; c < 3; ++c) {
    if (init.eigenvalues(c) <= 0) CHECK(init.config.col(c).isZero(0));
    else CHECK(init.config.col(c).norm() < 1e-6);
  }
}

TEST_CASE("float instantiation") {
  Eigen::MatrixXf m(3, 3);
  m << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  const auto init = classical_mds(validate_dissimilarity(m), 1);
  CHECK((euclidean_distances(init.config).matrix() - m).cwiseAbs().maxCoeff() < 1e-5f);
}
