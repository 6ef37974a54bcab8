#include "celltherm/drive_cycle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "celltherm/csv.hpp"
#include "celltherm/rng.hpp"

namespace celltherm {

namespace {

bool bit_equal(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b;
}

constexpr const char* kColumnNames[] = {"t",  "current", "voltage",   "T1", "T2",
                                        "T3", "T4",      "z_imag", "t_chamber"};

double DriveCycleSample::*column_member(int idx) {
  switch (idx) {
    case 0: return &DriveCycleSample::t;
    case 1: return &DriveCycleSample::current;
    case 2: return &DriveCycleSample::voltage;
    case 3: return &DriveCycleSample::T1;
    case 4: return &DriveCycleSample::T2;
    case 5: return &DriveCycleSample::T3;
    case 6: return &DriveCycleSample::T4;
    case 7: return &DriveCycleSample::z_imag;
    default: return &DriveCycleSample::t_chamber;
  }
}

}  // namespace

bool operator==(const DriveCycleSample& a, const DriveCycleSample& b) {
  for (int c = 0; c < 9; ++c) {
    if (!bit_equal(a.*column_member(c), b.*column_member(c))) return false;
  }
  return true;
}

double cycle_dt(const DriveCycle& cycle) {
  if (cycle.size() < 2) throw DomainError("cycle: need at least two samples");
  const double dt = cycle[1].t - cycle[0].t;
  if (!(dt > 0.0)) throw DomainError("cycle: time must be strictly increasing");
  for (std::size_t k = 1; k < cycle.size(); ++k) {
    const double step = cycle[k].t - cycle[k - 1].t;
    if (!(step > 0.0) || std::abs(step - dt) > 1e-9 * dt) {
      throw DomainError("cycle: non-uniform sample spacing at t=" +
                        format_double(cycle[k].t));
    }
  }
  return dt;
}

bool column_present(const DriveCycle& cycle, double DriveCycleSample::*column) {
  return std::any_of(cycle.begin(), cycle.end(),
                     [column](const DriveCycleSample& s) { return !std::isnan(s.*column); });
}

OcvTable OcvTable::flat(double volts) {
  OcvTable t;
  t.soc_points = Eigen::Vector2d(0.0, 1.0);
  t.ocv_points = Eigen::Vector2d(volts, volts);
  return t;
}

void OcvTable::validate() const {
  if (soc_points.size() < 2 || soc_points.size() != ocv_points.size()) {
    throw DomainError("ocv table: need matching soc/ocv arrays with >= 2 points");
  }
  for (Eigen::Index i = 1; i < soc_points.size(); ++i) {
    if (!(soc_points(i) > soc_points(i - 1))) {
      throw DomainError("ocv table: soc points must be strictly increasing");
    }
    if (ocv_points(i) < ocv_points(i - 1)) {
      throw DomainError("ocv table: ocv must be non-decreasing");
    }
  }
}

double OcvTable::value(double soc) const {
  const Eigen::Index n = soc_points.size();
  if (soc <= soc_points(0)) return ocv_points(0);
  if (soc >= soc_points(n - 1)) return ocv_points(n - 1);
  Eigen::Index hi = 1;
  while (soc_points(hi) < soc) ++hi;
  const double w = (soc - soc_points(hi - 1)) / (soc_points(hi) - soc_points(hi - 1));
  return ocv_points(hi - 1) + w * (ocv_points(hi) - ocv_points(hi - 1));
}

void CellElectrical::validate() const {
  if (!(capacity_ah > 0.0)) throw DomainError("electrical: capacity must be positive");
  if (soc0 < 0.0 || soc0 > 1.0) throw DomainError("electrical: soc0 must be in [0, 1]");
}

double heat_power(double current, double voltage, double ocv_voltage) {
  return current * (voltage - ocv_voltage);
}

double volumetric_heat(double heat_w, const CellGeometry& geometry) {
  geometry.validate();
  return heat_w / geometry.volume();
}

double soc_update(double soc, double current, double dt, double capacity_ah) {
  return std::clamp(soc + current * dt / (3600.0 * capacity_ah), 0.0, 1.0);
}

HeatSeries heat_series(const DriveCycle& cycle, const OcvTable& ocv,
                       const CellElectrical& electrical, const CellGeometry& geometry) {
  ocv.validate();
  electrical.validate();
  const double dt = cycle_dt(cycle);
  const auto n = static_cast<Eigen::Index>(cycle.size());
  HeatSeries out;
  out.q.resize(n);
  out.soc.resize(n);
  double soc = electrical.soc0;
  Eigen::Index negatives = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    out.soc(k) = soc;
    const double heat = heat_power(cycle[k].current, cycle[k].voltage, ocv.value(soc));
    if (heat < 0.0) ++negatives;
    out.q(k) = volumetric_heat(heat, geometry);
    soc = soc_update(soc, cycle[k].current, dt, electrical.capacity_ah);
  }
  out.negative_fraction = static_cast<double>(negatives) / static_cast<double>(n);
  return out;
}

DriveCycle synth_hev_cycle(std::uint64_t seed, double duration_s, double i_max,
                           const SynthOptions& options) {
  if (duration_s < 60.0) throw DomainError("synth cycle: duration must be >= 60 s");
  options.ocv.validate();
  const int n = static_cast<int>(std::lround(duration_s / options.dt));
  Rng rng(seed);

  // Burst/rest events; the sign bias keeps the profile charge-sustaining.
  std::vector<double> current(n, 0.0);
  double soc = options.soc0;
  int k = 0;
  while (k < n) {
    int length;
    double amps = 0.0;
    if (rng.uniform() < 0.35) {
      length = static_cast<int>(rng.uniform_int(2, 10));
    } else {
      length = static_cast<int>(rng.uniform_int(4, 20));
      const double amp = rng.uniform(0.15, 0.85) * i_max;
      double sign = (rng.uniform() < 0.7) ? ((soc > options.soc0) ? -1.0 : 1.0)
                                          : ((rng.uniform() < 0.5) ? -1.0 : 1.0);
      amps = sign * amp;
    }
    for (int i = k; i < std::min(k + length, n); ++i) {
      current[i] = amps;
      soc = soc_update(soc, amps, options.dt, options.capacity_ah);
    }
    k += length;
  }

  // Zero-current windows before each measurement instant.
  if (options.meas_period > 0.0 && options.pause > 0.0) {
    for (double mark = options.meas_period; mark <= duration_s + 1e-9;
         mark += options.meas_period) {
      const int stop = static_cast<int>(std::lround(mark / options.dt));
      const int start = std::max(0, stop - static_cast<int>(std::lround(options.pause / options.dt)));
      for (int i = start; i < std::min(stop, n); ++i) current[i] = 0.0;
    }
  }

  DriveCycle cycle(n);
  soc = options.soc0;
  for (int i = 0; i < n; ++i) {
    cycle[i].t = i * options.dt;
    cycle[i].current = std::clamp(current[i], -i_max, i_max);
    cycle[i].voltage = options.ocv.value(soc) + cycle[i].current * options.r0;
    soc = soc_update(soc, cycle[i].current, options.dt, options.capacity_ah);
  }
  return cycle;
}

DriveCycle read_cycle_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open cycle file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DomainError("cycle file '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split_csv_line(line);
  std::vector<int> column_of;  // csv position -> canonical column index
  std::vector<bool> seen(9, false);
  for (std::size_t pos = 0; pos < header.size(); ++pos) {
    int idx = -1;
    for (int c = 0; c < 9; ++c) {
      if (header[pos] == kColumnNames[c]) idx = c;
    }
    if (idx < 0) {
      throw DomainError("unknown column '" + header[pos] + "' in cycle header");
    }
    if (seen[idx]) throw DomainError("duplicate column '" + header[pos] + "'");
    seen[idx] = true;
    column_of.push_back(idx);
  }
  for (int c = 0; c < 3; ++c) {
    if (!seen[c]) {
      throw DomainError(std::string("cycle header is missing required column '") +
                        kColumnNames[c] + "'");
    }
  }

  DriveCycle cycle;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != column_of.size()) {
      throw DomainError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(column_of.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    DriveCycleSample s;
    for (std::size_t pos = 0; pos < fields.size(); ++pos) {
      const std::string where =
          "line " + std::to_string(line_no) + ", column " + kColumnNames[column_of[pos]];
      s.*column_member(column_of[pos]) = parse_csv_field(fields[pos], where);
    }
    for (int c = 0; c < 3; ++c) {
      if (std::isnan(s.*column_member(c))) {
        throw DomainError("line " + std::to_string(line_no) + ": required column '" +
                          kColumnNames[c] + "' is empty");
      }
    }
    cycle.push_back(s);
  }
  return cycle;
}

void write_cycle_csv(const std::string& path, const DriveCycle& cycle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open '" + path + "' for writing");
  // required columns always; optional ones only when some sample has a value
  std::vector<int> columns = {0, 1, 2};
  for (int c = 3; c < 9; ++c) {
    if (column_present(cycle, column_member(c))) columns.push_back(c);
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << (i ? "," : "") << kColumnNames[columns[i]];
  }
  out << '\n';
  for (const DriveCycleSample& s : cycle) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out << ',';
      out << format_optional(s.*column_member(columns[i]));
    }
    out << '\n';
  }
}

}  // namespace celltherm
