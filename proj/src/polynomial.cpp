#include "celltherm/polynomial.hpp"

#include <cmath>
#include <numbers>

#include "celltherm/types.hpp"

namespace celltherm {

Eigen::VectorXd legendre_values(int n, double x) {
  Eigen::VectorXd p(n);
  if (n <= 0) return p;
  p(0) = 1.0;
  if (n == 1) return p;
  p(1) = x;
  for (int k = 1; k + 1 < n; ++k) {
    p(k + 1) = ((2 * k + 1) * x * p(k) - k * p(k - 1)) / (k + 1);
  }
  return p;
}

Eigen::VectorXd legendre_derivatives(int n, double x) {
  Eigen::VectorXd p = legendre_values(n, x);
  Eigen::VectorXd d(n);
  if (n <= 0) return d;
  d(0) = 0.0;
  if (n == 1) return d;
  d(1) = 1.0;
  for (int k = 1; k + 1 < n; ++k) {
    // derivative recurrence: P'_{k+1} = P'_{k-1} + (2k+1) P_k
    d(k + 1) = d(k - 1) + (2 * k + 1) * p(k);
  }
  return d;
}

namespace {

// P_n and P'_n at x (degree n itself, not the first n).
void legendre_pn(int n, double x, double& pn, double& dpn) {
  double p0 = 1.0, p1 = x;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  pn = (n == 0) ? p0 : p1;
  dpn = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton from the Chebyshev-like initial guess
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pn = 0.0, dpn = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre_pn(n, x, pn, dpn);
      const double dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre_pn(n, x, pn, dpn);
    const double w = 2.0 / ((1.0 - x * x) * dpn * dpn);
    rule.nodes(i) = -x;
    rule.weights(i) = w;
    rule.nodes(n - 1 - i) = x;
    rule.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) {
    // midpoint node is exactly zero
    double pn = 0.0, dpn = 0.0;
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k < n; ++k) {
      const double p2 = (-k * p0) / (k + 1);
      p0 = p1;
      p1 = p2;
    }
    pn = p1;
    dpn = n * (0.0 - p0) / (-1.0);
    (void)pn;
    rule.nodes(n / 2) = 0.0;
    rule.weights(n / 2) = 2.0 / (dpn * dpn);
  }
  return rule;
}

}  // namespace celltherm
