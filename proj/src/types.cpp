#include "celltherm/types.hpp"

#include <string>

namespace celltherm {

void CellGeometry::validate() const {
  if (!(r_in > 0.0) || !(r_in < r_out)) {
    throw DomainError("geometry: require 0 < r_in < r_out, got r_in=" +
                      std::to_string(r_in) + " r_out=" + std::to_string(r_out));
  }
  if (!(height > 0.0)) {
    throw DomainError("geometry: height must be positive");
  }
}

void ThermalParams::validate() const {
  if (!(rho > 0.0) || !(cp > 0.0) || !(k_r > 0.0) || !(k_z > 0.0)) {
    throw DomainError("thermal: rho, cp, k_r, k_z must be strictly positive");
  }
  if (h_left < 0.0 || h_right < 0.0 || h_side < 0.0) {
    throw DomainError("thermal: convection coefficients must be non-negative");
  }
}

void SpectralConfig::validate() const {
  if (n_r < 2 || n_z < 2) {
    throw DomainError("spectral: mode counts n_r, n_z must be at least 2");
  }
}

namespace presets {

CellGeometry cell_32113() { return CellGeometry{1e-3, 16e-3, 100e-3}; }

ThermalParams config1() {
  ThermalParams p;
  p.rho = 2680.0;
  p.cp = 958.0;
  p.k_r = 0.35;
  p.k_z = 19.3;
  p.h_left = 155.0;
  p.h_right = 23.3;
  p.h_side = 16.9;
  p.t_ambient = 8.0;
  return p;
}

ThermalParams config2() {
  ThermalParams p = config1();
  p.h_left = 98.2;
  p.h_right = 7.2;
  p.h_side = 56.2;
  return p;
}

}  // namespace presets
}  // namespace celltherm
