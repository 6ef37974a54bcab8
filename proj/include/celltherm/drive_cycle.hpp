#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "celltherm/types.hpp"

namespace celltherm {

// One row of a drive cycle. Optional measurement columns are NaN when absent.
// Sign convention: positive current charges the cell.
struct DriveCycleSample {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  double t = 0.0;        // s
  double current = 0.0;  // A
  double voltage = 0.0;  // V
  double T1 = nan, T2 = nan, T3 = nan, T4 = nan;  // degC
  double z_imag = nan;     // Ohm
  double t_chamber = nan;  // degC
};

// Bit-level equality; NaN fields compare equal to NaN (absent == absent).
bool operator==(const DriveCycleSample& a, const DriveCycleSample& b);

using DriveCycle = std::vector<DriveCycleSample>;

// Requires non-empty, strictly increasing t with uniform spacing; returns dt.
double cycle_dt(const DriveCycle& cycle);

// True if any sample carries a value in the given column.
bool column_present(const DriveCycle& cycle, double DriveCycleSample::*column);

// Piecewise-linear open-circuit voltage against state of charge; evaluation
// clamps to the end values.
struct OcvTable {
  Eigen::VectorXd soc_points;  // strictly increasing fractions in [0, 1]
  Eigen::VectorXd ocv_points;  // non-decreasing volts

  static OcvTable flat(double volts = 3.3);
  double value(double soc) const;
  void validate() const;
};

struct CellElectrical {
  double capacity_ah = 4.4;
  double soc0 = 0.5;

  void validate() const;
};

// Ohmic heat Q = I (V - U_ocv); may be negative for inconsistent input data.
double heat_power(double current, double voltage, double ocv_voltage);

// q = Q / V_b, uniform over the jelly-roll volume.
double volumetric_heat(double heat_w, const CellGeometry& geometry);

// Coulomb counting, clamped to [0, 1].
double soc_update(double soc, double current, double dt, double capacity_ah);

// Heat input series for a cycle: coulomb-counted SoC, table OCV, ohmic heat.
struct HeatSeries {
  Eigen::VectorXd q;    // W m^-3, one value per sample
  Eigen::VectorXd soc;  // SoC at the start of each sample
  double negative_fraction = 0.0;  // diagnostic: share of samples with Q < 0
};

HeatSeries heat_series(const DriveCycle& cycle, const OcvTable& ocv,
                       const CellElectrical& electrical, const CellGeometry& geometry);

struct SynthOptions {
  double dt = 1.0;            // s
  double r0 = 0.020;          // Ohm, overpotential model V = U + I R0
  double capacity_ah = 4.4;
  double soc0 = 0.5;
  double meas_period = 24.0;  // s; a rest window precedes every multiple
  double pause = 4.0;         // s of zero current before each measurement
  OcvTable ocv = OcvTable::flat();
};

// Deterministic charge-sustaining burst/rest current profile with |I| <= i_max
// and zero-current windows before each measurement instant.
DriveCycle synth_hev_cycle(std::uint64_t seed, double duration_s, double i_max = 50.0,
                           const SynthOptions& options = {});

// CSV round trip: header `t,current,voltage[,T1,T2,T3,T4,z_imag,t_chamber]`,
// shortest-round-trip number formatting, empty fields for absent values.
DriveCycle read_cycle_csv(const std::string& path);
void write_cycle_csv(const std::string& path, const DriveCycle& cycle);

}  // namespace celltherm
