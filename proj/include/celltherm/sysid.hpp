#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "celltherm/drive_cycle.hpp"
#include "celltherm/estimation.hpp"
#include "celltherm/model.hpp"
#include "celltherm/types.hpp"

namespace celltherm {

// Offline identification of thermal parameters from a drive cycle with all
// four temperature columns. rho, cp and k_r stay fixed at their base values;
// the free set is any subset of {k_z, h_left, h_right, h_side}.
struct IdProblem {
  CellGeometry geometry;
  ThermalParams base;  // known values; free entries are overwritten per candidate
  SpectralConfig spectral;
  DriveCycle cycle;
  OcvTable ocv = OcvTable::flat();
  CellElectrical electrical;
  std::vector<std::string> free_params = {"k_z", "h_left", "h_right", "h_side"};
  std::vector<std::pair<double, double>> bounds;  // empty -> defaults per parameter
  double dt = 1.0;

  void validate() const;
  std::vector<std::pair<double, double>> effective_bounds() const;
};

// Base params with the free entries replaced by theta.
ThermalParams apply_theta(const IdProblem& problem, const Eigen::VectorXd& theta);

// Model-minus-measured [T1..T4] at every sample under an open-loop simulation
// with candidate theta.
Eigen::MatrixXd residual_series(const Eigen::VectorXd& theta, const IdProblem& problem);

// Sum over samples of the Euclidean norm of the 4-vector residual; +inf for
// candidates whose model assembly or simulation fails (rejected, not fatal).
double objective(const Eigen::VectorXd& theta, const IdProblem& problem);

struct IdResult {
  Eigen::VectorXd theta;
  ThermalParams params;  // base with identified values substituted
  double objective = 0.0;
  double best_start_objective = 0.0;
  Eigen::Vector4d rmse;  // per-sensor, degC
  int evaluations = 0;
  int restarts = 0;
};

IdResult identify(const IdProblem& problem, std::uint64_t seed = 0);

void write_id_report(const std::string& path, const IdProblem& problem,
                     const IdResult& result);

// Drive-cycle impedance calibration: a KF with T3 measurement input tracks the
// cycle (or the open-loop model when open_loop_pairing is set); its mean
// temperature at each impedance sample is paired with the measured z'' and a
// quadratic is fitted to the pairs. Needs at least 3 impedance samples.
ImpedanceCalibration calibrate_pipeline(const DriveCycle& cycle,
                                        const StateSpaceModel& model,
                                        const Eigen::VectorXd& q_series,
                                        const EstimatorConfig& kf_cfg,
                                        bool open_loop_pairing, double frequency_hz,
                                        double t0_guess);

}  // namespace celltherm
