#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "celltherm/types.hpp"

namespace celltherm {

// Continuous-time reduced model  E x' = A x + B u  with input u = [q, 1]^T.
// States are coefficients of the deviation field T - t_ambient on a tensor
// Legendre basis over the mapped annulus; state 0 is the uniform mode, so a
// spatially uniform field at t_ambient + c is exactly x = c * e_0.
struct StateSpaceModel {
  CellGeometry geometry;
  ThermalParams params;
  SpectralConfig config;
  Eigen::MatrixXd E;  // n x n, symmetric positive definite mass matrix
  Eigen::MatrixXd A;  // n x n, conduction + convective boundary terms
  Eigen::MatrixXd B;  // n x 2; column 0 loads q, column 1 is the constant channel

  int states() const { return config.states(); }
};

// Galerkin weak form of the conduction problem with Robin faces at r = r_out,
// z = 0 and z = height, zero flux at r = r_in. Throws NumericalError if the
// assembled mass matrix fails its positive-definiteness check.
StateSpaceModel assemble_model(const CellGeometry& geometry,
                               const ThermalParams& params,
                               const SpectralConfig& config);

// Zero-order-hold discretization: exact for piecewise-constant inputs.
struct DiscreteStateSpace {
  Eigen::MatrixXd A_bar;
  Eigen::MatrixXd B_bar;
  double dt = 0.0;
};

// Computed through the augmented-matrix exponential, so a singular E^{-1}A
// (the all-adiabatic constant mode) needs no special casing.
DiscreteStateSpace discretize(const StateSpaceModel& model, double dt);
DiscreteStateSpace discretize(const Eigen::MatrixXd& E, const Eigen::MatrixXd& A,
                              const Eigen::MatrixXd& B, double dt);

using ProbePoint = std::pair<double, double>;  // (r, z) in m

struct OutputMap {
  Eigen::MatrixXd C;       // m x n
  Eigen::VectorXd offset;  // degC, restores absolute temperature
  std::vector<std::string> labels;

  // Absolute temperatures C * state + offset, evaluated row by row.
  Eigen::VectorXd apply(const Eigen::VectorXd& state) const;
};

// T1 core mid-height, T2/T3/T4 on the curved surface at z = 0, H/2, H.
std::vector<ProbePoint> default_probe_points(const CellGeometry& geometry);

// Row i evaluates the basis expansion at points[i]; throws DomainError for a
// point outside the closed domain.
OutputMap output_map_for_points(const StateSpaceModel& model,
                                const std::vector<ProbePoint>& points,
                                std::vector<std::string> labels = {});

OutputMap default_output_map(const StateSpaceModel& model);

// Volume-average functional: t_mean = row * x + offset, exact for the basis.
struct MeanTemperatureRow {
  Eigen::RowVectorXd row;
  double offset = 0.0;

  double apply(const Eigen::VectorXd& state) const { return row.dot(state) + offset; }
};

MeanTemperatureRow mean_temperature_row(const StateSpaceModel& model);

// Inclusive tensor grids over [r_in, r_out] and [0, height]; endpoints exact.
Eigen::VectorXd field_radii(const CellGeometry& geometry, int n_pts);
Eigen::VectorXd field_heights(const CellGeometry& geometry, int n_pts);

// Absolute temperatures on the inclusive tensor grid; result(i, j) is the
// temperature at (field_radii[i], field_heights[j]).
Eigen::MatrixXd reconstruct_field(const StateSpaceModel& model,
                                  const Eigen::VectorXd& state,
                                  int n_r_pts, int n_z_pts);

// Deviation-state trajectory under a ZOH heat input; q_series holds one
// sample per step and row k of the result is the state after k steps.
Eigen::MatrixXd simulate(const DiscreteStateSpace& disc,
                         const Eigen::VectorXd& q_series,
                         const Eigen::VectorXd& x0);

// State vector of a spatially uniform deviation field.
Eigen::VectorXd uniform_state(const StateSpaceModel& model, double deviation);

}  // namespace celltherm
