#include "celltherm/twin.hpp"

#include <cmath>

#include "celltherm/rng.hpp"

namespace celltherm {

TwinResult run_twin(const TwinOptions& options, std::uint64_t seed) {
  options.geometry.validate();
  options.params.validate();
  options.spectral.validate();

  SynthOptions synth = options.cycle_options;
  synth.dt = options.dt;
  synth.meas_period = options.meas_period;

  TwinResult result;
  result.cycle = synth_hev_cycle(seed, options.duration, options.i_max, synth);
  const auto n = static_cast<Eigen::Index>(result.cycle.size());

  CellElectrical electrical;
  electrical.capacity_ah = synth.capacity_ah;
  electrical.soc0 = synth.soc0;
  const HeatSeries heat = heat_series(result.cycle, synth.ocv, electrical, options.geometry);

  // True plant: FD oracle marched sample by sample from the true uniform start.
  FdSolver plant(options.geometry, options.params, options.truth_grid);
  plant.set_uniform(options.t0_true);
  const int substeps =
      static_cast<int>(std::lround(options.dt / options.truth_grid.dt_solver));
  if (substeps < 1 ||
      std::abs(substeps * options.truth_grid.dt_solver - options.dt) > 1e-9 * options.dt) {
    throw DomainError("twin: dt must be an integer multiple of the truth grid dt_solver");
  }
  const std::vector<ProbePoint> probes = default_probe_points(options.geometry);

  result.truth_probes.resize(n, 4);
  result.truth_mean.resize(n);
  Rng noise(seed ^ 0x9e3779b97f4a7c15ull);
  const int meas_every = static_cast<int>(std::lround(options.meas_period / options.dt));
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k > 0) {
      for (int s = 0; s < substeps; ++s) plant.step(heat.q(k - 1));
    }
    for (int p = 0; p < 4; ++p) {
      result.truth_probes(k, p) = plant.probe(probes[p].first, probes[p].second);
    }
    result.truth_mean(k) = plant.mean_temperature();

    DriveCycleSample& sample = result.cycle[k];
    sample.T1 = result.truth_probes(k, 0) + options.sigma_t * noise.gaussian();
    sample.T2 = result.truth_probes(k, 1) + options.sigma_t * noise.gaussian();
    sample.T3 = result.truth_probes(k, 2) + options.sigma_t * noise.gaussian();
    sample.T4 = result.truth_probes(k, 3) + options.sigma_t * noise.gaussian();
    sample.t_chamber = options.params.t_ambient;
    if (k > 0 && meas_every > 0 && k % meas_every == 0) {
      sample.z_imag = predict_z(options.generating_cal, result.truth_mean(k)) +
                      options.sigma_z * noise.gaussian();
    }
  }
  result.truth_field = plant.field();
  result.truth_radii = plant.cell_radii();
  result.truth_heights = plant.cell_heights();

  const StateSpaceModel model =
      assemble_model(options.geometry, options.params, options.spectral);

  // Offline step: refit the impedance map from the cycle itself.
  EstimatorConfig kf_cfg;
  kf_cfg.r_meas = options.sigma_t * options.sigma_t;
  kf_cfg.q_proc_beta = options.beta_v_kf;
  kf_cfg.meas_period = options.dt;
  kf_cfg.dt = options.dt;
  kf_cfg.p0_uniform = options.p0_uniform;
  kf_cfg.p0_iso = options.p0_iso;
  result.fitted_cal =
      calibrate_pipeline(result.cycle, model, heat.q, kf_cfg, false,
                         options.generating_cal.frequency_hz, options.t0_true);

  // Online step: three estimators from the mismatched initial guess.
  EstimatorConfig ekf_cfg = kf_cfg;
  ekf_cfg.r_meas = options.sigma_z * options.sigma_z;
  ekf_cfg.q_proc_beta = options.beta_v_ekf;
  ekf_cfg.meas_period = options.meas_period;

  result.open_loop = run_estimator(result.cycle, heat.q, model, &result.fitted_cal,
                                   kf_cfg, EstimatorMode::open_loop, options.t0_guess);
  result.kf_t3 = run_estimator(result.cycle, heat.q, model, &result.fitted_cal, kf_cfg,
                               EstimatorMode::kf_t3, options.t0_guess);
  result.ekf_z = run_estimator(result.cycle, heat.q, model, &result.fitted_cal, ekf_cfg,
                               EstimatorMode::ekf_z, options.t0_guess);
  return result;
}

double probe_rmse(const EstimatorTrace& trace, const Eigen::MatrixXd& truth_probes,
                  int probe, double t_from) {
  double sum = 0.0;
  long count = 0;
  for (Eigen::Index k = 0; k < trace.t.size(); ++k) {
    if (trace.t(k) < t_from) continue;
    const double err = trace.outputs(k, probe) - truth_probes(k, probe);
    sum += err * err;
    ++count;
  }
  if (count == 0) throw DomainError("probe_rmse: no samples at or after t_from");
  return std::sqrt(sum / static_cast<double>(count));
}

}  // namespace celltherm
