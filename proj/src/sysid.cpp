#include "celltherm/sysid.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "celltherm/optim.hpp"

namespace celltherm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ThermalParams::*param_member(const std::string& name) {
  if (name == "k_z") return &ThermalParams::k_z;
  if (name == "h_left") return &ThermalParams::h_left;
  if (name == "h_right") return &ThermalParams::h_right;
  if (name == "h_side") return &ThermalParams::h_side;
  throw DomainError("sysid: unknown free parameter '" + name +
                    "' (expected k_z, h_left, h_right or h_side)");
}

std::pair<double, double> default_bounds(const std::string& name) {
  if (name == "k_z") return {1.0, 100.0};
  return {0.1, 500.0};  // forced-air convection range
}

Eigen::MatrixXd measured_temperatures(const DriveCycle& cycle) {
  Eigen::MatrixXd data(cycle.size(), 4);
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    data(k, 0) = cycle[k].T1;
    data(k, 1) = cycle[k].T2;
    data(k, 2) = cycle[k].T3;
    data(k, 3) = cycle[k].T4;
  }
  if (!data.allFinite()) {
    throw DomainError("sysid: cycle must carry T1..T4 values at every sample");
  }
  return data;
}

}  // namespace

void IdProblem::validate() const {
  geometry.validate();
  base.validate();
  spectral.validate();
  electrical.validate();
  ocv.validate();
  if (free_params.empty()) throw DomainError("sysid: no free parameters");
  if (!bounds.empty() && bounds.size() != free_params.size()) {
    throw DomainError("sysid: bounds count does not match free parameter count");
  }
  for (std::size_t i = 0; i < free_params.size(); ++i) {
    param_member(free_params[i]);  // validates the name
    const auto [lo, hi] = bounds.empty() ? default_bounds(free_params[i]) : bounds[i];
    if (!(lo > 0.0) || !(lo < hi)) {
      throw DomainError("sysid: bounds for " + free_params[i] +
                        " must satisfy 0 < lo < hi");
    }
  }
  measured_temperatures(cycle);
  cycle_dt(cycle);
}

std::vector<std::pair<double, double>> IdProblem::effective_bounds() const {
  if (!bounds.empty()) return bounds;
  std::vector<std::pair<double, double>> out;
  for (const auto& name : free_params) out.push_back(default_bounds(name));
  return out;
}

ThermalParams apply_theta(const IdProblem& problem, const Eigen::VectorXd& theta) {
  if (theta.size() != static_cast<Eigen::Index>(problem.free_params.size())) {
    throw DomainError("sysid: theta size does not match free parameter count");
  }
  ThermalParams params = problem.base;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    params.*param_member(problem.free_params[i]) = theta(i);
  }
  return params;
}

Eigen::MatrixXd residual_series(const Eigen::VectorXd& theta, const IdProblem& problem) {
  const ThermalParams params = apply_theta(problem, theta);
  const StateSpaceModel model = assemble_model(problem.geometry, params, problem.spectral);
  const DiscreteStateSpace disc = discretize(model, problem.dt);
  const HeatSeries heat = heat_series(problem.cycle, problem.ocv, problem.electrical,
                                      problem.geometry);
  const OutputMap probes = default_output_map(model);

  const auto n = static_cast<Eigen::Index>(problem.cycle.size());
  Eigen::MatrixXd residual(n, 4);
  const Eigen::MatrixXd data = measured_temperatures(problem.cycle);
  // The cycle launches from thermal equilibrium with the chamber.
  Eigen::VectorXd x = uniform_state(model, 0.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k > 0) x = disc.A_bar * x + disc.B_bar * Eigen::Vector2d(heat.q(k - 1), 1.0);
    residual.row(k) = (probes.apply(x) - data.row(k).transpose()).transpose();
  }
  return residual;
}

double objective(const Eigen::VectorXd& theta, const IdProblem& problem) {
  try {
    const Eigen::MatrixXd residual = residual_series(theta, problem);
    if (!residual.allFinite()) return kInf;
    return residual.rowwise().norm().sum();
  } catch (const NumericalError&) {
    return kInf;  // unstable or non-assemblable candidate: rejected point
  }
}

IdResult identify(const IdProblem& problem, std::uint64_t seed) {
  problem.validate();
  const auto box = problem.effective_bounds();
  const int dim = static_cast<int>(box.size());
  Eigen::VectorXd lower(dim), upper(dim);
  for (int i = 0; i < dim; ++i) {
    lower(i) = box[i].first;
    upper(i) = box[i].second;
  }

  const auto f = [&problem](const Eigen::VectorXd& theta) {
    return objective(theta, problem);
  };
  const MinimizeResult opt = minimize_box(f, lower, upper, seed);

  IdResult result;
  result.theta = opt.x;
  result.params = apply_theta(problem, opt.x);
  result.objective = opt.value;
  result.best_start_objective = opt.best_start_value;
  result.evaluations = opt.evaluations;
  result.restarts = opt.restarts;
  const Eigen::MatrixXd residual = residual_series(opt.x, problem);
  for (int s = 0; s < 4; ++s) {
    result.rmse(s) =
        std::sqrt(residual.col(s).squaredNorm() / static_cast<double>(residual.rows()));
  }
  return result;
}

void write_id_report(const std::string& path, const IdProblem& problem,
                     const IdResult& result) {
  nlohmann::json j;
  const auto box = problem.effective_bounds();
  for (std::size_t i = 0; i < problem.free_params.size(); ++i) {
    const auto& name = problem.free_params[i];
    j["identified"][name] = result.theta(static_cast<Eigen::Index>(i));
    j["bounds"][name] = {box[i].first, box[i].second};
  }
  j["objective"] = result.objective;
  j["best_start_objective"] = result.best_start_objective;
  j["rmse_degc"]["T1"] = result.rmse(0);
  j["rmse_degc"]["T2"] = result.rmse(1);
  j["rmse_degc"]["T3"] = result.rmse(2);
  j["rmse_degc"]["T4"] = result.rmse(3);
  j["evaluations"] = result.evaluations;
  j["restarts"] = result.restarts;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

ImpedanceCalibration calibrate_pipeline(const DriveCycle& cycle,
                                        const StateSpaceModel& model,
                                        const Eigen::VectorXd& q_series,
                                        const EstimatorConfig& kf_cfg,
                                        bool open_loop_pairing, double frequency_hz,
                                        double t0_guess) {
  if (!column_present(cycle, &DriveCycleSample::z_imag)) {
    throw DomainError("calibrate_pipeline: cycle has no z_imag values");
  }
  const EstimatorMode mode =
      open_loop_pairing ? EstimatorMode::open_loop : EstimatorMode::kf_t3;
  if (!open_loop_pairing && !column_present(cycle, &DriveCycleSample::T3)) {
    throw DomainError("calibrate_pipeline: KF pairing requires a T3 column");
  }
  const EstimatorTrace trace =
      run_estimator(cycle, q_series, model, nullptr, kf_cfg, mode, t0_guess);

  std::vector<std::pair<double, double>> pairs;
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    if (!std::isnan(cycle[k].z_imag)) {
      pairs.emplace_back(trace.t_mean(static_cast<Eigen::Index>(k)), cycle[k].z_imag);
    }
  }
  if (pairs.size() < 3) {
    throw DomainError("calibrate_pipeline: need at least 3 impedance samples, got " +
                      std::to_string(pairs.size()));
  }
  ImpedanceCalibration cal = calibrate(pairs, frequency_hz);
  cal.provenance = open_loop_pairing ? "drive-cycle fit (open-loop pairing)"
                                     : "drive-cycle fit (KF pairing)";
  return cal;
}

}  // namespace celltherm
