#include "celltherm/model.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "celltherm/polynomial.hpp"

namespace celltherm {

namespace {

// One-dimensional quadrature blocks for a basis of n Legendre modes on a
// coordinate interval [lo, hi], with an optional metric weight.
struct Basis1d {
  Eigen::MatrixXd mass;       // int psi_a psi_b w(c) dc
  Eigen::MatrixXd stiffness;  // int psi'_a psi'_b w(c) dc
  Eigen::VectorXd load;       // int psi_a w(c) dc
  Eigen::VectorXd at_lo;      // psi_a(lo)
  Eigen::VectorXd at_hi;      // psi_a(hi)
};

// weight(c) = c for the radial direction (cylindrical metric), 1 for axial.
Basis1d build_basis(int n, double lo, double hi, bool radial_metric, int nq) {
  const QuadratureRule rule = gauss_legendre(nq);
  const double jac = (hi - lo) / 2.0;
  Eigen::MatrixXd vals(nq, n), ders(nq, n);
  Eigen::VectorXd w(nq);
  for (int i = 0; i < nq; ++i) {
    const double xi = rule.nodes(i);
    const double c = lo + (xi + 1.0) / 2.0 * (hi - lo);
    vals.row(i) = legendre_values(n, xi).transpose();
    ders.row(i) = legendre_derivatives(n, xi).transpose() / jac;
    w(i) = rule.weights(i) * jac * (radial_metric ? c : 1.0);
  }
  Basis1d b;
  b.mass = vals.transpose() * w.asDiagonal() * vals;
  b.stiffness = ders.transpose() * w.asDiagonal() * ders;
  b.load = vals.transpose() * w;
  b.at_lo = legendre_values(n, -1.0);
  b.at_hi = legendre_values(n, 1.0);
  return b;
}

Eigen::RowVectorXd basis_row_at(const StateSpaceModel& model, double r, double z) {
  const auto& g = model.geometry;
  const double xi = 2.0 * (r - g.r_in) / (g.r_out - g.r_in) - 1.0;
  const double eta = 2.0 * z / g.height - 1.0;
  const Eigen::VectorXd pr = legendre_values(model.config.n_r, xi);
  const Eigen::VectorXd pz = legendre_values(model.config.n_z, eta);
  return Eigen::kroneckerProduct(pr, pz).transpose();
}

}  // namespace

StateSpaceModel assemble_model(const CellGeometry& geometry,
                               const ThermalParams& params,
                               const SpectralConfig& config) {
  geometry.validate();
  params.validate();
  config.validate();

  // Quadrature exact for every assembled integrand: the metric raises the
  // radial integrand to degree 2(n_r - 1) + 1 and a rule with m nodes is
  // exact through degree 2m - 1.
  const int nq = std::max(config.n_r, config.n_z) + 3;
  const Basis1d br = build_basis(config.n_r, geometry.r_in, geometry.r_out, true, nq);
  const Basis1d bz = build_basis(config.n_z, 0.0, geometry.height, false, nq);

  StateSpaceModel model;
  model.geometry = geometry;
  model.params = params;
  model.config = config;

  const int n = config.states();
  model.E = params.rho * params.cp * Eigen::kroneckerProduct(br.mass, bz.mass);

  Eigen::MatrixXd stiff =
      params.k_r * Eigen::kroneckerProduct(br.stiffness, bz.mass) +
      params.k_z * Eigen::kroneckerProduct(br.mass, bz.stiffness);
  // Robin surface terms from the weak form: curved surface carries the
  // cylindrical metric r_out, end faces carry the radial mass weight.
  stiff += params.h_side * geometry.r_out *
           Eigen::kroneckerProduct((br.at_hi * br.at_hi.transpose()).eval(), bz.mass);
  stiff += params.h_left *
           Eigen::kroneckerProduct(br.mass, (bz.at_lo * bz.at_lo.transpose()).eval());
  stiff += params.h_right *
           Eigen::kroneckerProduct(br.mass, (bz.at_hi * bz.at_hi.transpose()).eval());
  model.A = -stiff;

  model.B.resize(n, 2);
  model.B.col(0) = Eigen::kroneckerProduct(br.load, bz.load);
  // Deviation states relative to a constant ambient: no residual forcing.
  model.B.col(1).setZero();

  model.E = ((model.E + model.E.transpose()) / 2.0).eval();
  model.A = ((model.A + model.A.transpose()) / 2.0).eval();

  const Eigen::LLT<Eigen::MatrixXd> llt(model.E);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("assemble_model: mass matrix is not positive definite");
  }
  return model;
}

DiscreteStateSpace discretize(const Eigen::MatrixXd& E, const Eigen::MatrixXd& A,
                              const Eigen::MatrixXd& B, double dt) {
  if (!(dt > 0.0)) throw DomainError("discretize: dt must be positive");
  const int n = static_cast<int>(E.rows());
  const int m = static_cast<int>(B.cols());
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(E);
  const Eigen::MatrixXd m_dyn = lu.solve(A);
  const Eigen::MatrixXd m_in = lu.solve(B);

  // exp([[M, N], [0, 0]] dt) = [[exp(M dt), int_0^dt exp(M s) ds N], [0, I]]
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n + m, n + m);
  block.topLeftCorner(n, n) = m_dyn * dt;
  block.topRightCorner(n, m) = m_in * dt;
  const Eigen::MatrixXd eblock = block.exp();

  DiscreteStateSpace disc;
  disc.A_bar = eblock.topLeftCorner(n, n);
  disc.B_bar = eblock.topRightCorner(n, m);
  disc.dt = dt;
  return disc;
}

DiscreteStateSpace discretize(const StateSpaceModel& model, double dt) {
  return discretize(model.E, model.A, model.B, dt);
}

std::vector<ProbePoint> default_probe_points(const CellGeometry& g) {
  return {{g.r_in, g.height / 2.0},
          {g.r_out, 0.0},
          {g.r_out, g.height / 2.0},
          {g.r_out, g.height}};
}

OutputMap output_map_for_points(const StateSpaceModel& model,
                                const std::vector<ProbePoint>& points,
                                std::vector<std::string> labels) {
  const auto& g = model.geometry;
  const double tol_r = 1e-9 * (g.r_out - g.r_in);
  const double tol_z = 1e-9 * g.height;
  OutputMap map;
  const int m = static_cast<int>(points.size());
  map.C.resize(m, model.states());
  map.offset = Eigen::VectorXd::Constant(m, model.params.t_ambient);
  for (int i = 0; i < m; ++i) {
    const auto [r, z] = points[i];
    if (r < g.r_in - tol_r || r > g.r_out + tol_r || z < -tol_z || z > g.height + tol_z) {
      throw DomainError("output_map_for_points: point (" + std::to_string(r) + ", " +
                        std::to_string(z) + ") lies outside the cell domain");
    }
    map.C.row(i) = basis_row_at(model, r, z);
  }
  if (labels.empty()) {
    for (int i = 0; i < m; ++i) labels.push_back("P" + std::to_string(i + 1));
  }
  if (static_cast<int>(labels.size()) != m) {
    throw DomainError("output_map_for_points: label count does not match points");
  }
  map.labels = std::move(labels);
  return map;
}

OutputMap default_output_map(const StateSpaceModel& model) {
  return output_map_for_points(model, default_probe_points(model.geometry),
                               {"T1", "T2", "T3", "T4"});
}

MeanTemperatureRow mean_temperature_row(const StateSpaceModel& model) {
  // B column 0 already holds int psi r dr dz; normalize by int r dr dz.
  const auto& g = model.geometry;
  const double measure = (g.r_out * g.r_out - g.r_in * g.r_in) / 2.0 * g.height;
  MeanTemperatureRow mean;
  mean.row = model.B.col(0).transpose() / measure;
  mean.offset = model.params.t_ambient;
  return mean;
}

Eigen::VectorXd field_radii(const CellGeometry& g, int n_pts) {
  if (n_pts < 2) throw DomainError("field grid needs at least 2 points per axis");
  Eigen::VectorXd r(n_pts);
  for (int i = 0; i < n_pts; ++i) {
    r(i) = g.r_in + i * (g.r_out - g.r_in) / (n_pts - 1);
  }
  r(0) = g.r_in;
  r(n_pts - 1) = g.r_out;
  return r;
}

Eigen::VectorXd field_heights(const CellGeometry& g, int n_pts) {
  if (n_pts < 2) throw DomainError("field grid needs at least 2 points per axis");
  Eigen::VectorXd z(n_pts);
  for (int i = 0; i < n_pts; ++i) {
    z(i) = i * g.height / (n_pts - 1);
  }
  z(n_pts - 1) = g.height;
  return z;
}

Eigen::MatrixXd reconstruct_field(const StateSpaceModel& model,
                                  const Eigen::VectorXd& state,
                                  int n_r_pts, int n_z_pts) {
  const Eigen::VectorXd radii = field_radii(model.geometry, n_r_pts);
  const Eigen::VectorXd heights = field_heights(model.geometry, n_z_pts);
  // Evaluates through the same basis-row path as output_map_for_points, so a
  // grid node that coincides with a probe reproduces the probe output exactly.
  Eigen::MatrixXd field(n_r_pts, n_z_pts);
  for (int i = 0; i < n_r_pts; ++i) {
    for (int j = 0; j < n_z_pts; ++j) {
      field(i, j) = basis_row_at(model, radii(i), heights(j)).dot(state) +
                    model.params.t_ambient;
    }
  }
  return field;
}

Eigen::VectorXd OutputMap::apply(const Eigen::VectorXd& state) const {
  Eigen::VectorXd y(C.rows());
  for (Eigen::Index i = 0; i < C.rows(); ++i) {
    y(i) = C.row(i).dot(state) + offset(i);
  }
  return y;
}

Eigen::MatrixXd simulate(const DiscreteStateSpace& disc,
                         const Eigen::VectorXd& q_series,
                         const Eigen::VectorXd& x0) {
  const int n = static_cast<int>(disc.A_bar.rows());
  if (x0.size() != n) throw DomainError("simulate: state size mismatch");
  const auto steps = q_series.size();
  Eigen::MatrixXd states(steps + 1, n);
  Eigen::VectorXd x = x0;
  states.row(0) = x.transpose();
  for (Eigen::Index k = 0; k < steps; ++k) {
    x = disc.A_bar * x + disc.B_bar * Eigen::Vector2d(q_series(k), 1.0);
    states.row(k + 1) = x.transpose();
  }
  return states;
}

Eigen::VectorXd uniform_state(const StateSpaceModel& model, double deviation) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(model.states());
  x(0) = deviation;
  return x;
}

}  // namespace celltherm
