#pragma once

#include <Eigen/Dense>

namespace celltherm {

// Values of the Legendre polynomials P_0 .. P_{n-1} at x.
Eigen::VectorXd legendre_values(int n, double x);

// First derivatives dP_k/dx for k = 0 .. n-1.
Eigen::VectorXd legendre_derivatives(int n, double x);

struct QuadratureRule {
  Eigen::VectorXd nodes;    // in (-1, 1), ascending
  Eigen::VectorXd weights;  // positive, sum to 2
};

// Gauss-Legendre rule with n points, exact for polynomials of degree 2n-1.
QuadratureRule gauss_legendre(int n);

}  // namespace celltherm
