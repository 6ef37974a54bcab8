#include "celltherm/impedance.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "celltherm/csv.hpp"
#include "celltherm/rng.hpp"
#include "celltherm/types.hpp"

namespace celltherm {

double predict_z(const ImpedanceCalibration& cal, double t_mean) {
  return cal.a1 + cal.a2 * t_mean + cal.a3 * t_mean * t_mean;
}

double dz_dt(const ImpedanceCalibration& cal, double t_mean) {
  return cal.a2 + 2.0 * cal.a3 * t_mean;
}

bool in_range(const ImpedanceCalibration& cal, double t_mean) {
  return t_mean >= cal.t_min && t_mean <= cal.t_max;
}

ImpedanceCalibration calibrate(const std::vector<std::pair<double, double>>& pairs,
                               double frequency_hz) {
  if (pairs.size() < 3) {
    throw DomainError("calibrate: need at least 3 (temperature, impedance) pairs, got " +
                      std::to_string(pairs.size()));
  }
  double t_lo = pairs[0].first, t_hi = pairs[0].first;
  for (const auto& [t, z] : pairs) {
    t_lo = std::min(t_lo, t);
    t_hi = std::max(t_hi, t);
  }
  const double spread = t_hi - t_lo;
  if (spread < 2.0) {
    throw DomainError("calibrate: temperature spread " + format_double(spread) +
                      " degC is below the 2 degC minimum; the quadratic fit "
                      "would be ill-conditioned");
  }

  const auto n = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = pairs[i].first;
    design(i, 0) = 1.0;
    design(i, 1) = t;
    design(i, 2) = t * t;
    rhs(i) = pairs[i].second;
  }
  const Eigen::Vector3d coeffs = design.colPivHouseholderQr().solve(rhs);

  ImpedanceCalibration cal;
  cal.a1 = coeffs(0);
  cal.a2 = coeffs(1);
  cal.a3 = coeffs(2);
  cal.frequency_hz = frequency_hz;
  cal.t_min = t_lo;
  cal.t_max = t_hi;
  cal.rms_residual = std::sqrt((design * coeffs - rhs).squaredNorm() / static_cast<double>(n));
  cal.monotonic = dz_dt(cal, t_lo) * dz_dt(cal, t_hi) > 0.0;
  cal.provenance = "fit";
  return cal;
}

double synth_measurement(const ImpedanceCalibration& cal, double t_mean,
                         double noise_sigma, std::uint64_t seed) {
  if (noise_sigma < 0.0) throw DomainError("synth_measurement: sigma must be >= 0");
  if (noise_sigma == 0.0) return predict_z(cal, t_mean);
  Rng rng(seed);
  return predict_z(cal, t_mean) + noise_sigma * rng.gaussian();
}

ImpedanceCalibration synthetic_default() {
  ImpedanceCalibration cal;
  cal.a1 = 1e-3;
  cal.a2 = -2e-5;
  cal.a3 = 2e-7;
  cal.frequency_hz = 215.0;
  cal.t_min = 5.0;
  cal.t_max = 35.0;
  cal.rms_residual = 0.0;
  cal.monotonic = true;
  cal.provenance = "synthetic-default";
  return cal;
}

void save_calibration(const std::string& path, const ImpedanceCalibration& cal) {
  nlohmann::json j;
  j["a1_ohm"] = cal.a1;
  j["a2_ohm_per_degc"] = cal.a2;
  j["a3_ohm_per_degc2"] = cal.a3;
  j["frequency_hz"] = cal.frequency_hz;
  j["t_min_degc"] = cal.t_min;
  j["t_max_degc"] = cal.t_max;
  j["rms_residual_ohm"] = cal.rms_residual;
  j["monotonic"] = cal.monotonic;
  j["provenance"] = cal.provenance;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

ImpedanceCalibration load_calibration(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open calibration file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("calibration file '" + path + "': " + e.what());
  }
  const auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) {
      throw DomainError("calibration file '" + path + "': missing key '" + key + "'");
    }
    return j.at(key);
  };
  ImpedanceCalibration cal;
  try {
    cal.a1 = need("a1_ohm").get<double>();
    cal.a2 = need("a2_ohm_per_degc").get<double>();
    cal.a3 = need("a3_ohm_per_degc2").get<double>();
    cal.frequency_hz = need("frequency_hz").get<double>();
    cal.t_min = need("t_min_degc").get<double>();
    cal.t_max = need("t_max_degc").get<double>();
    cal.rms_residual = need("rms_residual_ohm").get<double>();
    cal.monotonic = need("monotonic").get<bool>();
    cal.provenance = need("provenance").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("calibration file '" + path + "': " + e.what());
  }
  return cal;
}

}  // namespace celltherm
