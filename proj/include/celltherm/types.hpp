#pragma once

#include <numbers>
#include <stdexcept>

namespace celltherm {

// Bad inputs, schema violations, precondition failures. CLI exit code 2.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical breakdown (divergence, indefinite matrices, ...). CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Annular jelly-roll domain: r in [r_in, r_out], z in [0, height]. Units: m.
struct CellGeometry {
  double r_in = 1e-3;
  double r_out = 16e-3;
  double height = 100e-3;

  double volume() const {
    return std::numbers::pi * (r_out * r_out - r_in * r_in) * height;
  }
  void validate() const;
};

// Homogeneous solid with anisotropic conductivity and per-face convection.
// The inner annulus (r = r_in) is always adiabatic. Temperatures in degC.
struct ThermalParams {
  double rho = 2680.0;     // kg m^-3
  double cp = 958.0;       // J kg^-1 K^-1
  double k_r = 0.35;       // W m^-1 K^-1, radial
  double k_z = 19.3;       // W m^-1 K^-1, axial
  double h_left = 0.0;     // W m^-2 K^-1 at z = 0
  double h_right = 0.0;    // W m^-2 K^-1 at z = height
  double h_side = 0.0;     // W m^-2 K^-1 at r = r_out
  double t_ambient = 8.0;  // degC

  bool adiabatic() const { return h_left == 0.0 && h_right == 0.0 && h_side == 0.0; }
  void validate() const;
};

// Tensor-product basis order of the reduced model; state dimension n_r * n_z.
struct SpectralConfig {
  int n_r = 5;
  int n_z = 5;

  int states() const { return n_r * n_z; }
  void validate() const;
};

namespace presets {
// 4.4 Ah cylindrical cell, 32113 format jelly roll.
CellGeometry cell_32113();
// End-dominated cooling: heat sink on the left end, side insulated.
ThermalParams config1();
// Side-dominated cooling: curved surface exposed.
ThermalParams config2();
}  // namespace presets

}  // namespace celltherm
