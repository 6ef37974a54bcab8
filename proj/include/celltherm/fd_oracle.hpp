#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <vector>

#include "celltherm/model.hpp"
#include "celltherm/types.hpp"

namespace celltherm {

struct FdGrid {
  int n_r_cells = 200;
  int n_z_cells = 200;
  double dt_solver = 0.1;  // s

  void validate() const;
};

// Dense finite-volume reference solver for the same boundary-value problem,
// on an independent discretization: cell-centered grid, conservative radial
// fluxes, Robin faces folded into ghost-cell film conductances, and implicit
// (backward-Euler, unconditionally stable) stepping. Deliberately favors
// accuracy over speed; used as ground truth for the reduced model and as the
// plant in synthetic twin experiments.
class FdSolver {
 public:
  FdSolver(const CellGeometry& geometry, const ThermalParams& params, const FdGrid& grid);

  void set_uniform(double temperature_c);                     // absolute degC
  void set_deviation(const Eigen::MatrixXd& field);           // n_r x n_z, degC above ambient
  void step(double q_volumetric);                             // advance one dt_solver

  Eigen::MatrixXd field() const;                              // absolute degC at cell centers
  const Eigen::VectorXd& deviation() const { return u_; }
  double probe(double r, double z) const;                     // absolute degC
  double mean_temperature() const;                            // volume average, absolute
  double stored_energy() const;                               // J relative to ambient
  double boundary_loss_rate() const;                          // W through convective faces
  double time() const { return time_; }
  const FdGrid& grid() const { return grid_; }
  Eigen::VectorXd cell_radii() const;
  Eigen::VectorXd cell_heights() const;

  // Direct solve of the steady problem at constant q; requires some h > 0.
  Eigen::MatrixXd steady_state(double q_volumetric) const;

 private:
  int index(int i, int j) const { return i * grid_.n_z_cells + j; }

  CellGeometry geometry_;
  ThermalParams params_;
  FdGrid grid_;
  double dr_ = 0.0, dz_ = 0.0;
  Eigen::VectorXd cell_volume_;    // per radian, m^3
  Eigen::VectorXd heat_capacity_;  // rho cp * volume per radian
  Eigen::VectorXd wall_conductance_;  // per-cell total convective conductance, per radian
  Eigen::SparseMatrix<double> conductance_;  // symmetric PSD operator G
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> stepper_;  // C/dt + G
  Eigen::VectorXd u_;  // deviation from ambient, degC
  double time_ = 0.0;
};

struct FdSolution {
  Eigen::MatrixXd probe_series;  // (n_samples + 1) x n_probes, absolute degC
  Eigen::VectorXd mean_series;   // n_samples + 1, absolute degC
  Eigen::MatrixXd final_field;   // n_r x n_z cell centers, absolute degC
};

// Transient solve under a ZOH heat series sampled at dt_sample (which must be
// an integer multiple of grid.dt_solver), starting from a uniform field.
FdSolution solve_transient(const CellGeometry& geometry, const ThermalParams& params,
                           const Eigen::VectorXd& q_series, double dt_sample,
                           double t0_uniform, const FdGrid& grid,
                           const std::vector<ProbePoint>& probes);

Eigen::MatrixXd steady_state(const CellGeometry& geometry, const ThermalParams& params,
                             double q_const, const FdGrid& grid);

}  // namespace celltherm
