#include "celltherm/fd_oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace celltherm {

void FdGrid::validate() const {
  if (n_r_cells < 10 || n_z_cells < 10) {
    throw DomainError("fd grid: need at least 10 cells per direction");
  }
  if (!(dt_solver > 0.0)) throw DomainError("fd grid: dt_solver must be positive");
}

namespace {

// Conductance from a cell center to ambient through half a cell plus the
// convective film; identical to eliminating a ghost cell under the Robin
// condition. Zero h means an adiabatic face.
double film_conductance(double h, double k, double half_cell) {
  if (h <= 0.0) return 0.0;
  return 1.0 / (half_cell / k + 1.0 / h);
}

}  // namespace

FdSolver::FdSolver(const CellGeometry& geometry, const ThermalParams& params,
                   const FdGrid& grid)
    : geometry_(geometry), params_(params), grid_(grid) {
  geometry.validate();
  params.validate();
  grid.validate();

  const int nr = grid_.n_r_cells, nz = grid_.n_z_cells;
  const int n = nr * nz;
  dr_ = (geometry.r_out - geometry.r_in) / nr;
  dz_ = geometry.height / nz;

  cell_volume_.resize(n);
  wall_conductance_ = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * static_cast<std::size_t>(n));
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);

  const double u_side = film_conductance(params.h_side, params.k_r, dr_ / 2.0);
  const double u_left = film_conductance(params.h_left, params.k_z, dz_ / 2.0);
  const double u_right = film_conductance(params.h_right, params.k_z, dz_ / 2.0);

  for (int i = 0; i < nr; ++i) {
    const double rc = geometry.r_in + (i + 0.5) * dr_;
    const double r_face_in = geometry.r_in + i * dr_;
    const double r_face_out = r_face_in + dr_;
    for (int j = 0; j < nz; ++j) {
      const int a = index(i, j);
      cell_volume_(a) = rc * dr_ * dz_;
      // radial neighbours (conservative: conductance on the shared face)
      if (i > 0) {
        const double g = params.k_r * r_face_in * dz_ / dr_;
        trips.emplace_back(a, index(i - 1, j), -g);
        diag(a) += g;
      }
      if (i < nr - 1) {
        const double g = params.k_r * r_face_out * dz_ / dr_;
        trips.emplace_back(a, index(i + 1, j), -g);
        diag(a) += g;
      } else {
        const double g = u_side * r_face_out * dz_;
        diag(a) += g;
        wall_conductance_(a) += g;
      }
      // axial neighbours
      if (j > 0) {
        const double g = params.k_z * rc * dr_ / dz_;
        trips.emplace_back(a, index(i, j - 1), -g);
        diag(a) += g;
      } else {
        const double g = u_left * rc * dr_;
        diag(a) += g;
        wall_conductance_(a) += g;
      }
      if (j < nz - 1) {
        const double g = params.k_z * rc * dr_ / dz_;
        trips.emplace_back(a, index(i, j + 1), -g);
        diag(a) += g;
      } else {
        const double g = u_right * rc * dr_;
        diag(a) += g;
        wall_conductance_(a) += g;
      }
    }
  }
  for (int a = 0; a < n; ++a) trips.emplace_back(a, a, diag(a));
  conductance_.resize(n, n);
  conductance_.setFromTriplets(trips.begin(), trips.end());

  heat_capacity_ = params.rho * params.cp * cell_volume_;

  Eigen::SparseMatrix<double> cap_over_dt(n, n);
  std::vector<Eigen::Triplet<double>> cap_trips;
  cap_trips.reserve(n);
  for (int a = 0; a < n; ++a) {
    cap_trips.emplace_back(a, a, heat_capacity_(a) / grid_.dt_solver);
  }
  cap_over_dt.setFromTriplets(cap_trips.begin(), cap_trips.end());
  const Eigen::SparseMatrix<double> step_matrix = conductance_ + cap_over_dt;
  stepper_.compute(step_matrix);
  if (stepper_.info() != Eigen::Success) {
    throw NumericalError("fd oracle: backward-Euler step matrix factorization failed");
  }
  u_ = Eigen::VectorXd::Zero(n);
}

void FdSolver::set_uniform(double temperature_c) {
  u_.setConstant(temperature_c - params_.t_ambient);
  time_ = 0.0;
}

void FdSolver::set_deviation(const Eigen::MatrixXd& field) {
  if (field.rows() != grid_.n_r_cells || field.cols() != grid_.n_z_cells) {
    throw DomainError("fd oracle: deviation field has wrong shape");
  }
  for (int i = 0; i < grid_.n_r_cells; ++i) {
    for (int j = 0; j < grid_.n_z_cells; ++j) u_(index(i, j)) = field(i, j);
  }
  time_ = 0.0;
}

void FdSolver::step(double q_volumetric) {
  const Eigen::VectorXd rhs =
      heat_capacity_.cwiseProduct(u_) / grid_.dt_solver + cell_volume_ * q_volumetric;
  u_ = stepper_.solve(rhs);
  time_ += grid_.dt_solver;
  if (!u_.allFinite() || u_.cwiseAbs().maxCoeff() + std::abs(params_.t_ambient) > 1e3) {
    throw NumericalError("fd oracle: backward-Euler transient diverged (|T| > 1e3 degC)");
  }
}

Eigen::MatrixXd FdSolver::field() const {
  Eigen::MatrixXd f(grid_.n_r_cells, grid_.n_z_cells);
  for (int i = 0; i < grid_.n_r_cells; ++i) {
    for (int j = 0; j < grid_.n_z_cells; ++j) {
      f(i, j) = u_(index(i, j)) + params_.t_ambient;
    }
  }
  return f;
}

double FdSolver::probe(double r, double z) const {
  const auto& g = geometry_;
  const double tol_r = 1e-9 * (g.r_out - g.r_in);
  const double tol_z = 1e-9 * g.height;
  if (r < g.r_in - tol_r || r > g.r_out + tol_r || z < -tol_z || z > g.height + tol_z) {
    throw DomainError("fd probe: point outside the cell domain");
  }
  const int nr = grid_.n_r_cells, nz = grid_.n_z_cells;
  // bilinear interpolation on cell centers, clamped to the center hull
  double x = std::clamp((r - g.r_in) / dr_ - 0.5, 0.0, static_cast<double>(nr - 1));
  double y = std::clamp(z / dz_ - 0.5, 0.0, static_cast<double>(nz - 1));
  const int i0 = std::min(static_cast<int>(x), nr - 2);
  const int j0 = std::min(static_cast<int>(y), nz - 2);
  const double fx = x - i0, fy = y - j0;
  double v = u_(index(i0, j0)) * (1 - fx) * (1 - fy) +
             u_(index(i0 + 1, j0)) * fx * (1 - fy) +
             u_(index(i0, j0 + 1)) * (1 - fx) * fy +
             u_(index(i0 + 1, j0 + 1)) * fx * fy;
  // Wall values continue the scheme's film model: deviation at the surface is
  // the cell-center deviation scaled by (film flux) / h.
  const auto wall_scale = [](double h, double k, double half_cell) {
    if (h <= 0.0) return 1.0;
    return film_conductance(h, k, half_cell) / h;
  };
  if (r >= g.r_out - tol_r) v *= wall_scale(params_.h_side, params_.k_r, dr_ / 2.0);
  if (z <= tol_z) v *= wall_scale(params_.h_left, params_.k_z, dz_ / 2.0);
  if (z >= g.height - tol_z) v *= wall_scale(params_.h_right, params_.k_z, dz_ / 2.0);
  return v + params_.t_ambient;
}

double FdSolver::mean_temperature() const {
  return cell_volume_.dot(u_) / cell_volume_.sum() + params_.t_ambient;
}

double FdSolver::stored_energy() const {
  return 2.0 * std::numbers::pi * heat_capacity_.dot(u_);
}

double FdSolver::boundary_loss_rate() const {
  return 2.0 * std::numbers::pi * wall_conductance_.dot(u_);
}

Eigen::VectorXd FdSolver::cell_radii() const {
  Eigen::VectorXd r(grid_.n_r_cells);
  for (int i = 0; i < grid_.n_r_cells; ++i) r(i) = geometry_.r_in + (i + 0.5) * dr_;
  return r;
}

Eigen::VectorXd FdSolver::cell_heights() const {
  Eigen::VectorXd z(grid_.n_z_cells);
  for (int j = 0; j < grid_.n_z_cells; ++j) z(j) = (j + 0.5) * dz_;
  return z;
}

Eigen::MatrixXd FdSolver::steady_state(double q_volumetric) const {
  if (params_.adiabatic()) {
    throw DomainError("fd oracle: no steady state exists with all faces adiabatic");
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(conductance_);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("fd oracle: steady conductance factorization failed");
  }
  const Eigen::VectorXd u = solver.solve(cell_volume_ * q_volumetric);
  Eigen::MatrixXd f(grid_.n_r_cells, grid_.n_z_cells);
  for (int i = 0; i < grid_.n_r_cells; ++i) {
    for (int j = 0; j < grid_.n_z_cells; ++j) {
      f(i, j) = u(index(i, j)) + params_.t_ambient;
    }
  }
  return f;
}

FdSolution solve_transient(const CellGeometry& geometry, const ThermalParams& params,
                           const Eigen::VectorXd& q_series, double dt_sample,
                           double t0_uniform, const FdGrid& grid,
                           const std::vector<ProbePoint>& probes) {
  if (!(dt_sample >= grid.dt_solver)) {
    throw DomainError("fd oracle: sample spacing must be >= dt_solver");
  }
  const int substeps = static_cast<int>(std::lround(dt_sample / grid.dt_solver));
  if (std::abs(substeps * grid.dt_solver - dt_sample) > 1e-9 * dt_sample) {
    throw DomainError("fd oracle: dt_sample must be an integer multiple of dt_solver");
  }

  FdSolver solver(geometry, params, grid);
  solver.set_uniform(t0_uniform);

  const auto n_samples = q_series.size();
  const int n_probes = static_cast<int>(probes.size());
  FdSolution out;
  out.probe_series.resize(n_samples + 1, n_probes);
  out.mean_series.resize(n_samples + 1);
  const auto record = [&](Eigen::Index row) {
    for (int p = 0; p < n_probes; ++p) {
      out.probe_series(row, p) = solver.probe(probes[p].first, probes[p].second);
    }
    out.mean_series(row) = solver.mean_temperature();
  };
  record(0);
  for (Eigen::Index k = 0; k < n_samples; ++k) {
    for (int s = 0; s < substeps; ++s) solver.step(q_series(k));
    record(k + 1);
  }
  out.final_field = solver.field();
  return out;
}

Eigen::MatrixXd steady_state(const CellGeometry& geometry, const ThermalParams& params,
                             double q_const, const FdGrid& grid) {
  return FdSolver(geometry, params, grid).steady_state(q_const);
}

}  // namespace celltherm
