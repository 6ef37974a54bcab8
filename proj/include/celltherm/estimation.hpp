#pragma once

#include <Eigen/Dense>
#include <string>

#include "celltherm/drive_cycle.hpp"
#include "celltherm/impedance.hpp"
#include "celltherm/model.hpp"
#include "celltherm/types.hpp"

namespace celltherm {

struct EstimatorConfig {
  double r_meas = 9e-10;       // measurement noise variance: Ohm^2 (EKF) or degC^2 (KF)
  double q_proc_beta = 5e-3;   // process-noise scale beta_v
  double meas_period = 24.0;   // s between measurement updates
  double dt = 1.0;             // s between time updates
  double p0_uniform = 400.0;   // degC^2 initial variance on the uniform mode
  double p0_iso = 1e-2;        // degC^2 isotropic initial floor

  void validate() const;
};

// Process covariance 2 beta^2 I(n): diagonal entries keep the 2 beta^2 scale
// of the tuning rule while matching the model's state dimension.
Eigen::MatrixXd process_noise(const EstimatorConfig& cfg, int n);

struct EstimatorState {
  Eigen::VectorXd x_hat;  // deviation-state estimate
  Eigen::MatrixXd p;      // error covariance, kept symmetric
  long k = 0;             // step index
};

// Initial estimate for a uniform field guess: the uncertainty sits on the
// uniform mode (an unknown equilibrated start) plus a small isotropic floor.
EstimatorState make_initial_state(const StateSpaceModel& model, double t0_guess,
                                  const EstimatorConfig& cfg);

// x  <-  A_bar x + B_bar u ;  P  <-  A_bar P A_bar' + R_v
void time_update(EstimatorState& state, const DiscreteStateSpace& disc,
                 const Eigen::Vector2d& u, const Eigen::MatrixXd& r_proc);

struct UpdateResult {
  double innovation = 0.0;           // measurement minus prediction
  double innovation_variance = 0.0;  // H P H' + R
};

// Nonlinear impedance measurement: predicted z'' through the mean-temperature
// row and the quadratic map, Jacobian by the chain rule, Joseph-form
// covariance update. Throws NumericalError if the innovation variance is not
// positive (filter divergence).
UpdateResult ekf_measurement_update(EstimatorState& state, double z_meas,
                                    const ImpedanceCalibration& cal,
                                    const MeanTemperatureRow& mean_row, double r_meas);

// Linear temperature measurement with output row h_row and offset.
UpdateResult kf_measurement_update(EstimatorState& state, double t_meas,
                                   const Eigen::RowVectorXd& h_row, double offset,
                                   double r_meas);

enum class EstimatorMode { ekf_z, kf_t3, open_loop };

EstimatorMode parse_mode(const std::string& name);
std::string mode_name(EstimatorMode mode);

struct EstimatorTrace {
  Eigen::VectorXd t;           // sample times
  Eigen::MatrixXd states;      // posterior state per sample (N x n)
  Eigen::MatrixXd outputs;     // T1..T4, absolute degC (N x 4)
  Eigen::VectorXd t_mean;      // volume average, absolute degC
  Eigen::VectorXd z_pred;      // predicted impedance (NaN without calibration)
  Eigen::VectorXd x_norm;      // ||x_hat||
  Eigen::VectorXd z_meas;      // consumed measurement, NaN where none
  Eigen::VectorXd innovation;  // NaN where no update ran
  int measurement_updates = 0;
  int out_of_range = 0;  // mean-temperature predictions outside calibration range
};

// Runs the filter over a cycle: a time update every dt and a measurement
// update at each sample that carries the mode's measurement column. ekf_z
// consumes z_imag, kf_t3 consumes T3, open_loop never updates.
EstimatorTrace run_estimator(const DriveCycle& cycle, const Eigen::VectorXd& q_series,
                             const StateSpaceModel& model, const ImpedanceCalibration* cal,
                             const EstimatorConfig& cfg, EstimatorMode mode,
                             double t0_guess);

// Trace CSV: t,x_norm,T1,T2,T3,T4,Tmean,z_pred,z_meas,innovation with empty
// fields at steps without measurements.
void write_trace_csv(const std::string& path, const EstimatorTrace& trace);

}  // namespace celltherm
