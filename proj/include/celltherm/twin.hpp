#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "celltherm/drive_cycle.hpp"
#include "celltherm/estimation.hpp"
#include "celltherm/fd_oracle.hpp"
#include "celltherm/impedance.hpp"
#include "celltherm/model.hpp"
#include "celltherm/sysid.hpp"

namespace celltherm {

// Synthetic twin experiment: the finite-difference oracle plays the true
// plant, generating noisy impedance and thermocouple measurements that the
// reduced-model estimators consume. Mirrors the offline/online flow: the
// impedance map used by the EKF is refitted from the generated cycle, not
// taken from the generating one.
struct TwinOptions {
  CellGeometry geometry;
  ThermalParams params;       // includes the chamber temperature t_ambient
  SpectralConfig spectral;
  FdGrid truth_grid{100, 100, 1.0};
  double duration = 2400.0;   // s
  double dt = 1.0;            // s
  double i_max = 50.0;        // A
  double t0_true = 8.0;       // degC, true initial uniform field
  double t0_guess = 25.0;     // degC, estimator initial uniform field
  double sigma_z = 3e-5;      // Ohm, impedance measurement noise
  double sigma_t = 5e-4;      // degC, temperature measurement noise
  double meas_period = 24.0;  // s between impedance samples
  double beta_v_ekf = 5e-3;
  double beta_v_kf = 0.05;
  double p0_uniform = 400.0;
  double p0_iso = 1e-2;
  ImpedanceCalibration generating_cal;  // default: synthetic_default()
  SynthOptions cycle_options;

  TwinOptions() : generating_cal(synthetic_default()) {}
};

struct TwinResult {
  DriveCycle cycle;               // with noisy T1..T4, periodic z_imag, t_chamber
  Eigen::MatrixXd truth_probes;   // N x 4, noiseless absolute degC
  Eigen::VectorXd truth_mean;     // N, noiseless volume average
  Eigen::MatrixXd truth_field;    // final cell-centered field
  Eigen::VectorXd truth_radii;    // cell-center coordinates of truth_field
  Eigen::VectorXd truth_heights;
  ImpedanceCalibration fitted_cal;
  EstimatorTrace open_loop;
  EstimatorTrace kf_t3;
  EstimatorTrace ekf_z;
};

TwinResult run_twin(const TwinOptions& options, std::uint64_t seed);

// Root-mean-square estimate-minus-truth for one probe column, restricted to
// samples with t >= t_from.
double probe_rmse(const EstimatorTrace& trace, const Eigen::MatrixXd& truth_probes,
                  int probe, double t_from = 0.0);

}  // namespace celltherm
