#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace celltherm {

// Quadratic map from volume-average temperature to imaginary impedance at a
// fixed excitation frequency: z'' = a1 + a2 T + a3 T^2. The map must be
// strictly monotonic over its validity interval to be usable as a filter
// measurement; `monotonic` records the check outcome at fit time.
struct ImpedanceCalibration {
  double a1 = 0.0;  // Ohm
  double a2 = 0.0;  // Ohm / degC
  double a3 = 0.0;  // Ohm / degC^2
  double frequency_hz = 215.0;
  double t_min = 0.0;  // degC, validity interval
  double t_max = 0.0;
  double rms_residual = 0.0;  // Ohm, fit quality
  bool monotonic = true;
  std::string provenance;
};

double predict_z(const ImpedanceCalibration& cal, double t_mean);

// Analytic slope a2 + 2 a3 T, used by the EKF measurement Jacobian.
double dz_dt(const ImpedanceCalibration& cal, double t_mean);

bool in_range(const ImpedanceCalibration& cal, double t_mean);

// Least-squares quadratic fit of (t_mean, z_meas) pairs. Requires at least 3
// pairs spanning >= 2 degC; a non-monotonic fit is returned with the warning
// flag cleared rather than rejected.
ImpedanceCalibration calibrate(const std::vector<std::pair<double, double>>& pairs,
                               double frequency_hz);

// predict_z plus seeded gaussian noise; bitwise deterministic per seed.
double synth_measurement(const ImpedanceCalibration& cal, double t_mean,
                         double noise_sigma, std::uint64_t seed);

// Plausible coefficients for twin experiments; the magnitudes put the map in
// the 1e-4..1e-3 Ohm range over 5..35 degC. Not fitted to any physical cell.
ImpedanceCalibration synthetic_default();

void save_calibration(const std::string& path, const ImpedanceCalibration& cal);
ImpedanceCalibration load_calibration(const std::string& path);

}  // namespace celltherm
