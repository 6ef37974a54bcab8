#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "celltherm/polynomial.hpp"

using namespace celltherm;

TEST_CASE("legendre values match closed forms") {
  const double x = 0.3;
  const Eigen::VectorXd p = legendre_values(5, x);
  CHECK(p(0) == doctest::Approx(1.0));
  CHECK(p(1) == doctest::Approx(x));
  CHECK(p(2) == doctest::Approx(0.5 * (3 * x * x - 1)));
  CHECK(p(3) == doctest::Approx(0.5 * (5 * x * x * x - 3 * x)));
  CHECK(p(4) == doctest::Approx((35 * x * x * x * x - 30 * x * x + 3) / 8));
}

TEST_CASE("legendre derivatives match finite differences") {
  const double eps = 1e-6;
  for (double x : {-0.9, -0.2, 0.0, 0.55, 0.95}) {
    const Eigen::VectorXd d = legendre_derivatives(8, x);
    const Eigen::VectorXd hi = legendre_values(8, x + eps);
    const Eigen::VectorXd lo = legendre_values(8, x - eps);
    for (int k = 0; k < 8; ++k) {
      CHECK(d(k) == doctest::Approx((hi(k) - lo(k)) / (2 * eps)).epsilon(1e-6));
    }
  }
}

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 3, 5, 8, 12}) {
    const QuadratureRule rule = gauss_legendre(n);
    CHECK(rule.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
    // integrate x^d over [-1, 1] for all exact degrees
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double integral = 0.0;
      for (int i = 0; i < n; ++i) {
        integral += rule.weights(i) * std::pow(rule.nodes(i), d);
      }
      const double exact = (d % 2 == 1) ? 0.0 : 2.0 / (d + 1);
      CHECK(integral == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("gauss-legendre nodes are symmetric and ascending") {
  const QuadratureRule rule = gauss_legendre(7);
  for (int i = 1; i < 7; ++i) CHECK(rule.nodes(i) > rule.nodes(i - 1));
  for (int i = 0; i < 7; ++i) {
    CHECK(rule.nodes(i) == doctest::Approx(-rule.nodes(6 - i)).epsilon(1e-15));
    CHECK(rule.weights(i) == doctest::Approx(rule.weights(6 - i)).epsilon(1e-14));
  }
  CHECK(rule.nodes(3) == 0.0);
}

TEST_CASE("legendre orthogonality under the gauss rule") {
  const int n = 6;
  const QuadratureRule rule = gauss_legendre(n + 2);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (int q = 0; q < rule.nodes.size(); ++q) {
    const Eigen::VectorXd p = legendre_values(n, rule.nodes(q));
    gram += rule.weights(q) * p * p.transpose();
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double expected = (a == b) ? 2.0 / (2 * a + 1) : 0.0;
      CHECK(gram(a, b) == doctest::Approx(expected).epsilon(1e-13));
    }
  }
}
