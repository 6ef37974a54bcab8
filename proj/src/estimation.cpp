#include "celltherm/estimation.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "celltherm/csv.hpp"

namespace celltherm {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

void EstimatorConfig::validate() const {
  if (!(r_meas > 0.0)) throw DomainError("estimator: r_meas must be positive");
  if (q_proc_beta < 0.0) throw DomainError("estimator: q_proc_beta must be >= 0");
  if (!(dt > 0.0)) throw DomainError("estimator: dt must be positive");
  const double ratio = meas_period / dt;
  if (!(meas_period > 0.0) || std::abs(ratio - std::lround(ratio)) > 1e-9) {
    throw DomainError("estimator: meas_period must be an integer multiple of dt");
  }
  if (p0_uniform < 0.0 || p0_iso < 0.0) {
    throw DomainError("estimator: initial variances must be >= 0");
  }
}

Eigen::MatrixXd process_noise(const EstimatorConfig& cfg, int n) {
  return 2.0 * cfg.q_proc_beta * cfg.q_proc_beta *
         Eigen::MatrixXd::Identity(n, n);
}

EstimatorState make_initial_state(const StateSpaceModel& model, double t0_guess,
                                  const EstimatorConfig& cfg) {
  const int n = model.states();
  EstimatorState state;
  state.x_hat = uniform_state(model, t0_guess - model.params.t_ambient);
  state.p = cfg.p0_iso * Eigen::MatrixXd::Identity(n, n);
  state.p(0, 0) += cfg.p0_uniform;
  state.k = 0;
  return state;
}

void time_update(EstimatorState& state, const DiscreteStateSpace& disc,
                 const Eigen::Vector2d& u, const Eigen::MatrixXd& r_proc) {
  state.x_hat = disc.A_bar * state.x_hat + disc.B_bar * u;
  state.p = disc.A_bar * state.p * disc.A_bar.transpose() + r_proc;
  state.p = ((state.p + state.p.transpose()) / 2.0).eval();
  state.k += 1;
}

namespace {

// Shared scalar-measurement update in Joseph form.
UpdateResult scalar_update(EstimatorState& state, double innovation,
                           const Eigen::RowVectorXd& h_row, double r_meas) {
  const Eigen::VectorXd ph = state.p * h_row.transpose();
  const double s = h_row.dot(ph) + r_meas;
  if (!(s > 0.0)) {
    throw NumericalError("measurement update: innovation covariance is not positive "
                         "(filter divergence)");
  }
  const Eigen::VectorXd gain = ph / s;
  state.x_hat += gain * innovation;
  const Eigen::MatrixXd ikh =
      Eigen::MatrixXd::Identity(state.p.rows(), state.p.cols()) - gain * h_row;
  state.p = ikh * state.p * ikh.transpose() + gain * r_meas * gain.transpose();
  state.p = ((state.p + state.p.transpose()) / 2.0).eval();
  return {innovation, s};
}

}  // namespace

UpdateResult ekf_measurement_update(EstimatorState& state, double z_meas,
                                    const ImpedanceCalibration& cal,
                                    const MeanTemperatureRow& mean_row, double r_meas) {
  const double t_bar = mean_row.apply(state.x_hat);
  const double z_hat = predict_z(cal, t_bar);
  const Eigen::RowVectorXd h_row = dz_dt(cal, t_bar) * mean_row.row;
  return scalar_update(state, z_meas - z_hat, h_row, r_meas);
}

UpdateResult kf_measurement_update(EstimatorState& state, double t_meas,
                                   const Eigen::RowVectorXd& h_row, double offset,
                                   double r_meas) {
  const double prediction = h_row.dot(state.x_hat) + offset;
  return scalar_update(state, t_meas - prediction, h_row, r_meas);
}

EstimatorMode parse_mode(const std::string& name) {
  if (name == "ekf_z") return EstimatorMode::ekf_z;
  if (name == "kf_t3") return EstimatorMode::kf_t3;
  if (name == "open_loop") return EstimatorMode::open_loop;
  throw DomainError("unknown estimator mode '" + name +
                    "' (expected ekf_z, kf_t3 or open_loop)");
}

std::string mode_name(EstimatorMode mode) {
  switch (mode) {
    case EstimatorMode::ekf_z: return "ekf_z";
    case EstimatorMode::kf_t3: return "kf_t3";
    default: return "open_loop";
  }
}

EstimatorTrace run_estimator(const DriveCycle& cycle, const Eigen::VectorXd& q_series,
                             const StateSpaceModel& model, const ImpedanceCalibration* cal,
                             const EstimatorConfig& cfg, EstimatorMode mode,
                             double t0_guess) {
  cfg.validate();
  const double dt = cycle_dt(cycle);
  if (std::abs(dt - cfg.dt) > 1e-9 * cfg.dt) {
    throw DomainError("run_estimator: cycle spacing does not match estimator dt");
  }
  const auto n_samples = static_cast<Eigen::Index>(cycle.size());
  if (q_series.size() != n_samples) {
    throw DomainError("run_estimator: heat series length does not match the cycle");
  }
  if (mode == EstimatorMode::ekf_z) {
    if (cal == nullptr) {
      throw DomainError("run_estimator: ekf_z mode requires an impedance calibration");
    }
    if (!column_present(cycle, &DriveCycleSample::z_imag)) {
      throw DomainError("run_estimator: ekf_z mode requires a z_imag column with values");
    }
  }
  if (mode == EstimatorMode::kf_t3 && !column_present(cycle, &DriveCycleSample::T3)) {
    throw DomainError("run_estimator: kf_t3 mode requires a T3 column with values");
  }

  const DiscreteStateSpace disc = discretize(model, cfg.dt);
  const OutputMap probes = default_output_map(model);
  const MeanTemperatureRow mean_row = mean_temperature_row(model);
  const Eigen::MatrixXd r_proc = process_noise(cfg, model.states());
  const Eigen::RowVectorXd t3_row = probes.C.row(2);

  EstimatorState state = make_initial_state(model, t0_guess, cfg);

  EstimatorTrace trace;
  trace.t.resize(n_samples);
  trace.states.resize(n_samples, model.states());
  trace.outputs.resize(n_samples, 4);
  trace.t_mean.resize(n_samples);
  trace.z_pred = Eigen::VectorXd::Constant(n_samples, kNan);
  trace.x_norm.resize(n_samples);
  trace.z_meas = Eigen::VectorXd::Constant(n_samples, kNan);
  trace.innovation = Eigen::VectorXd::Constant(n_samples, kNan);

  for (Eigen::Index k = 0; k < n_samples; ++k) {
    if (k > 0) {
      time_update(state, disc, Eigen::Vector2d(q_series(k - 1), 1.0), r_proc);
    }
    if (mode == EstimatorMode::ekf_z && !std::isnan(cycle[k].z_imag)) {
      const UpdateResult res =
          ekf_measurement_update(state, cycle[k].z_imag, *cal, mean_row, cfg.r_meas);
      trace.z_meas(k) = cycle[k].z_imag;
      trace.innovation(k) = res.innovation;
      ++trace.measurement_updates;
    } else if (mode == EstimatorMode::kf_t3 && !std::isnan(cycle[k].T3)) {
      const UpdateResult res = kf_measurement_update(state, cycle[k].T3, t3_row,
                                                     probes.offset(2), cfg.r_meas);
      trace.z_meas(k) = cycle[k].T3;
      trace.innovation(k) = res.innovation;
      ++trace.measurement_updates;
    }
    trace.t(k) = cycle[k].t;
    trace.states.row(k) = state.x_hat.transpose();
    trace.outputs.row(k) = probes.apply(state.x_hat).transpose();
    trace.t_mean(k) = mean_row.apply(state.x_hat);
    trace.x_norm(k) = state.x_hat.norm();
    if (cal != nullptr) {
      trace.z_pred(k) = predict_z(*cal, trace.t_mean(k));
      if (!in_range(*cal, trace.t_mean(k))) ++trace.out_of_range;
    }
  }
  return trace;
}

void write_trace_csv(const std::string& path, const EstimatorTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open '" + path + "' for writing");
  out << "t,x_norm,T1,T2,T3,T4,Tmean,z_pred,z_meas,innovation\n";
  for (Eigen::Index k = 0; k < trace.t.size(); ++k) {
    out << format_double(trace.t(k)) << ',' << format_double(trace.x_norm(k));
    for (int p = 0; p < 4; ++p) out << ',' << format_double(trace.outputs(k, p));
    out << ',' << format_double(trace.t_mean(k));
    out << ',' << format_optional(trace.z_pred(k));
    out << ',' << format_optional(trace.z_meas(k));
    out << ',' << format_optional(trace.innovation(k));
    out << '\n';
  }
}

}  // namespace celltherm
