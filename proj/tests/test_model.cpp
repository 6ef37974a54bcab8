#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "celltherm/fd_oracle.hpp"
#include "celltherm/model.hpp"
#include "celltherm/rng.hpp"

using namespace celltherm;

namespace {

StateSpaceModel config1_model(int order = 5) {
  return assemble_model(presets::cell_32113(), presets::config1(),
                        SpectralConfig{order, order});
}

StateSpaceModel adiabatic_model() {
  ThermalParams p = presets::config1();
  p.h_left = p.h_right = p.h_side = 0.0;
  return assemble_model(presets::cell_32113(), p, SpectralConfig{5, 5});
}

// Fine-step RK4 on E x' = A x + B u as an independent time-integration oracle.
Eigen::VectorXd rk4_oracle(const StateSpaceModel& model, const Eigen::VectorXd& q_series,
                           double dt, int substeps, const Eigen::VectorXd& x0) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(model.E);
  const Eigen::MatrixXd m = lu.solve(model.A);
  const Eigen::MatrixXd nb = lu.solve(model.B);
  Eigen::VectorXd x = x0;
  const double h = dt / substeps;
  for (Eigen::Index k = 0; k < q_series.size(); ++k) {
    const Eigen::VectorXd forcing = nb * Eigen::Vector2d(q_series(k), 1.0);
    for (int s = 0; s < substeps; ++s) {
      const Eigen::VectorXd k1 = m * x + forcing;
      const Eigen::VectorXd k2 = m * (x + h / 2 * k1) + forcing;
      const Eigen::VectorXd k3 = m * (x + h / 2 * k2) + forcing;
      const Eigen::VectorXd k4 = m * (x + h * k3) + forcing;
      x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
  }
  return x;
}

double slowest_time_constant(const StateSpaceModel& model) {
  const Eigen::MatrixXd m = model.E.partialPivLu().solve(model.A);
  const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(m).eigenvalues();
  double re_max = -1e30;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    re_max = std::max(re_max, eig(i).real());
  }
  return -1.0 / re_max;
}

}  // namespace

TEST_CASE("mass matrix is SPD and invariants of A hold") {
  const StateSpaceModel model = config1_model();
  const Eigen::LLT<Eigen::MatrixXd> llt(model.E);
  CHECK(llt.info() == Eigen::Success);
  CHECK(model.E.isApprox(model.E.transpose(), 1e-14));

  // with convection present every eigenvalue of E^-1 A has negative real part
  const Eigen::MatrixXd m = model.E.partialPivLu().solve(model.A);
  const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(m).eigenvalues();
  for (Eigen::Index i = 0; i < eig.size(); ++i) CHECK(eig(i).real() < 0.0);

  const double tau = slowest_time_constant(model);
  CHECK(tau > 0.0);
  CHECK(tau < 1e5);
}

TEST_CASE("adiabatic model has exactly one zero mode") {
  const StateSpaceModel model = adiabatic_model();
  const Eigen::MatrixXd m = model.E.partialPivLu().solve(model.A);
  const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(m).eigenvalues();
  int zeros = 0;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (std::abs(eig(i)) < 1e-9) {
      ++zeros;
    } else {
      CHECK(eig(i).real() < 0.0);
    }
  }
  CHECK(zeros == 1);

  // uniform field is an equilibrium: A annihilates the constant mode
  const Eigen::VectorXd x = uniform_state(model, 3.0);
  CHECK((model.A * x).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("uniform equilibrium at ambient stays put") {
  const StateSpaceModel model = config1_model();
  const DiscreteStateSpace disc = discretize(model, 1.0);
  const Eigen::MatrixXd states =
      simulate(disc, Eigen::VectorXd::Zero(50), uniform_state(model, 0.0));
  const OutputMap out = default_output_map(model);
  for (Eigen::Index k = 0; k < states.rows(); ++k) {
    const Eigen::VectorXd y = out.apply(states.row(k).transpose());
    for (int p = 0; p < 4; ++p) {
      CHECK(y(p) == doctest::Approx(model.params.t_ambient).epsilon(1e-12));
    }
  }
}

TEST_CASE("discretize: scalar system has the analytic solution") {
  Eigen::MatrixXd e(1, 1), a(1, 1), b(1, 2);
  e << 1.0;
  a << -1.0;
  b << 1.0, 0.0;
  const DiscreteStateSpace disc = discretize(e, a, b, 1.0);
  CHECK(disc.A_bar(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(disc.B_bar(0, 0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("discretize: zero dynamics limit") {
  Eigen::MatrixXd e(2, 2), a(2, 2), b(2, 2);
  e << 2.0, 0.0, 0.0, 4.0;
  a.setZero();
  b << 1.0, 0.5, 2.0, 0.0;
  const double dt = 0.25;
  const DiscreteStateSpace disc = discretize(e, a, b, dt);
  CHECK(disc.A_bar.isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-13));
  CHECK(disc.B_bar.isApprox(dt * e.inverse() * b, 1e-13));
}

TEST_CASE("discrete simulation matches fine-step RK4") {
  const StateSpaceModel model = config1_model();
  const DiscreteStateSpace disc = discretize(model, 1.0);
  Rng rng(11);
  Eigen::VectorXd q(200);
  for (int k = 0; k < 200; ++k) q(k) = 2e5 * rng.uniform();
  const Eigen::MatrixXd states = simulate(disc, q, uniform_state(model, 0.0));
  const Eigen::VectorXd x_rk4 = rk4_oracle(model, q, 1.0, 100, uniform_state(model, 0.0));
  const OutputMap out = default_output_map(model);
  const Eigen::VectorXd y_disc = out.apply(states.row(states.rows() - 1).transpose());
  const Eigen::VectorXd y_rk4 = out.apply(x_rk4);
  CHECK((y_disc - y_rk4).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("spectral radius below one for any cooling and dt") {
  for (const ThermalParams& params : {presets::config1(), presets::config2()}) {
    const StateSpaceModel model =
        assemble_model(presets::cell_32113(), params, SpectralConfig{5, 5});
    for (double dt : {0.1, 1.0, 10.0}) {
      const DiscreteStateSpace disc = discretize(model, dt);
      const Eigen::VectorXcd eig =
          Eigen::EigenSolver<Eigen::MatrixXd>(disc.A_bar).eigenvalues();
      CHECK(eig.cwiseAbs().maxCoeff() < 1.0);
    }
  }
}

TEST_CASE("mean temperature row: partition of unity and linear field") {
  const StateSpaceModel model = config1_model();
  const MeanTemperatureRow mean = mean_temperature_row(model);

  // uniform field at 8 degC
  CHECK(mean.apply(uniform_state(model, 0.0)) == doctest::Approx(8.0).epsilon(1e-13));
  CHECK(mean.row(0) == doctest::Approx(1.0).epsilon(1e-13));

  // linear-in-z profile b*z sits in the basis span: z = H/2 + (H/2) P1(eta)
  const double b = 0.37;
  const double h = model.geometry.height;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(model.states());
  x(0) = b * h / 2.0;  // (k=0, l=0)
  x(1) = b * h / 2.0;  // (k=0, l=1)
  const double analytic = model.params.t_ambient + b * h / 2.0;
  CHECK(std::abs(mean.apply(x) - analytic) / std::abs(analytic) < 1e-9);
}

TEST_CASE("mean temperature matches dense-grid quadrature of the field") {
  const StateSpaceModel model = config1_model();
  const DiscreteStateSpace disc = discretize(model, 1.0);
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(600, 1.872e5);
  const Eigen::MatrixXd states = simulate(disc, q, uniform_state(model, 0.0));
  const Eigen::VectorXd x = states.row(states.rows() - 1).transpose();

  const MeanTemperatureRow mean = mean_temperature_row(model);
  const int pts = 400;
  const Eigen::MatrixXd field = reconstruct_field(model, x, pts, pts);
  const Eigen::VectorXd radii = field_radii(model.geometry, pts);
  const Eigen::VectorXd heights = field_heights(model.geometry, pts);
  // trapezoid in z and in r with the cylindrical r-weight
  double integral = 0.0, measure = 0.0;
  for (int i = 0; i + 1 < pts; ++i) {
    for (int j = 0; j + 1 < pts; ++j) {
      const double dr = radii(i + 1) - radii(i);
      const double dz = heights(j + 1) - heights(j);
      const double cell =
          (radii(i) * field(i, j) + radii(i) * field(i, j + 1) +
           radii(i + 1) * field(i + 1, j) + radii(i + 1) * field(i + 1, j + 1)) / 4.0;
      integral += cell * dr * dz;
      measure += (radii(i) + radii(i + 1)) / 2.0 * dr * dz;
    }
  }
  CHECK(std::abs(mean.apply(x) - integral / measure) < 1e-4);
}

TEST_CASE("output map: defaults, uniform state, domain check") {
  const StateSpaceModel model = config1_model();
  const OutputMap out = default_output_map(model);
  CHECK(out.labels == std::vector<std::string>{"T1", "T2", "T3", "T4"});

  const Eigen::VectorXd y = out.apply(uniform_state(model, 0.0));
  for (int p = 0; p < 4; ++p) {
    CHECK(y(p) == doctest::Approx(model.params.t_ambient).epsilon(1e-13));
  }

  CHECK_THROWS_AS(
      output_map_for_points(model, {{model.geometry.r_out * 1.1, 0.0}}),
      DomainError);
  CHECK_THROWS_AS(output_map_for_points(model, {{model.geometry.r_in, -0.01}}),
                  DomainError);
}

TEST_CASE("reconstructed grid reproduces probe outputs exactly") {
  const StateSpaceModel model = config1_model();
  const DiscreteStateSpace disc = discretize(model, 1.0);
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(100, 1.872e5);
  const Eigen::VectorXd x =
      simulate(disc, q, uniform_state(model, 0.0)).row(100).transpose();

  // a 3x3 inclusive grid contains all four default probe points
  const Eigen::MatrixXd field = reconstruct_field(model, x, 3, 3);
  const OutputMap out = default_output_map(model);
  const Eigen::VectorXd y = out.apply(x);
  CHECK(field(0, 1) == y(0));  // (r_in, H/2)
  CHECK(field(2, 0) == y(1));  // (r_out, 0)
  CHECK(field(2, 1) == y(2));  // (r_out, H/2)
  CHECK(field(2, 2) == y(3));  // (r_out, H)
}

TEST_CASE("zero deviation reconstructs the ambient field") {
  const StateSpaceModel model = config1_model();
  const Eigen::MatrixXd field =
      reconstruct_field(model, uniform_state(model, 0.0), 7, 9);
  CHECK((field.array() - model.params.t_ambient).abs().maxCoeff() < 1e-13);
}

TEST_CASE("axial symmetry when end cooling is symmetric") {
  ThermalParams params = presets::config1();
  params.h_left = params.h_right = 40.0;
  const StateSpaceModel model =
      assemble_model(presets::cell_32113(), params, SpectralConfig{5, 5});
  const DiscreteStateSpace disc = discretize(model, 1.0);
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(500, 1.872e5);
  const Eigen::VectorXd x =
      simulate(disc, q, uniform_state(model, 0.0)).row(500).transpose();
  const int nz = 33;
  const Eigen::MatrixXd field = reconstruct_field(model, x, 17, nz);
  for (int i = 0; i < 17; ++i) {
    for (int j = 0; j < nz; ++j) {
      CHECK(std::abs(field(i, j) - field(i, nz - 1 - j)) < 1e-9);
    }
  }
}

TEST_CASE("asymmetric end cooling pins the coldest face") {
  ThermalParams params = presets::config1();  // h_left = 155 >> h_right = 23.3
  const StateSpaceModel model =
      assemble_model(presets::cell_32113(), params, SpectralConfig{5, 5});
  const DiscreteStateSpace disc = discretize(model, 1.0);
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(3000, 1.872e5);
  const Eigen::VectorXd x =
      simulate(disc, q, uniform_state(model, 0.0)).row(3000).transpose();
  const Eigen::MatrixXd field = reconstruct_field(model, x, 9, 9);
  Eigen::Index imin = 0, jmin = 0;
  field.minCoeff(&imin, &jmin);
  CHECK(jmin == 0);  // coldest on the strongly cooled z=0 face
}

TEST_CASE("decay towards ambient is monotone over time-constant windows") {
  const StateSpaceModel model = config1_model();
  const double tau = slowest_time_constant(model);
  const DiscreteStateSpace disc = discretize(model, tau);
  Rng rng(23);
  Eigen::VectorXd x(model.states());
  for (int i = 0; i < model.states(); ++i) x(i) = rng.uniform(-2.0, 2.0);
  double previous = 1e30;
  for (int window = 0; window < 10; ++window) {
    const Eigen::MatrixXd field = reconstruct_field(model, x, 21, 21);
    const double extent = (field.array() - model.params.t_ambient).abs().maxCoeff();
    CHECK(extent <= previous + 1e-12);
    previous = extent;
    x = disc.A_bar * x + disc.B_bar * Eigen::Vector2d(0.0, 1.0);
  }
}

TEST_CASE("adiabatic heating ramps the mean at q / (rho cp)") {
  const StateSpaceModel model = adiabatic_model();
  const DiscreteStateSpace disc = discretize(model, 1.0);
  const double q = 1e5;
  const Eigen::MatrixXd states =
      simulate(disc, Eigen::VectorXd::Constant(100, q), uniform_state(model, 0.0));
  const MeanTemperatureRow mean = mean_temperature_row(model);
  const double expected_rate = q / (model.params.rho * model.params.cp);
  for (int k = 20; k < 100; k += 20) {
    const double rate = (mean.apply(states.row(k + 1).transpose()) -
                         mean.apply(states.row(k).transpose())) / disc.dt;
    CHECK(std::abs(rate - expected_rate) / expected_rate < 1e-8);
  }
}

TEST_CASE("step transient tracks the fd oracle and converges with order") {
  const CellGeometry geometry = presets::cell_32113();
  const ThermalParams params = presets::config1();
  const int n_steps = 600;
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(n_steps, 1.872e5);

  const FdGrid grid{100, 100, 1.0};
  const std::vector<ProbePoint> probes = default_probe_points(geometry);
  const FdSolution oracle =
      solve_transient(geometry, params, q, 1.0, params.t_ambient, grid, probes);

  const auto max_probe_error = [&](int order) {
    const StateSpaceModel model =
        assemble_model(geometry, params, SpectralConfig{order, order});
    const DiscreteStateSpace disc = discretize(model, 1.0);
    const Eigen::MatrixXd states = simulate(disc, q, uniform_state(model, 0.0));
    const OutputMap out = default_output_map(model);
    double err = 0.0;
    for (int k = 0; k <= n_steps; ++k) {
      const Eigen::VectorXd y = out.apply(states.row(k).transpose());
      err = std::max(err,
                     (y - oracle.probe_series.row(k).transpose()).cwiseAbs().maxCoeff());
    }
    return err;
  };

  const double err5 = max_probe_error(5);
  const double err10 = max_probe_error(10);
  CHECK(err5 < 0.1);
  CHECK(err10 < err5);
}
