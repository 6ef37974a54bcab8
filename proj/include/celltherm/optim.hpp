#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>

namespace celltherm {

struct NelderMeadOptions {
  int max_evals_per_start = 0;  // 0 = auto (500 * dim)
  double x_tol = 1e-7;          // simplex diameter in normalized coordinates
  double f_tol = 1e-12;         // absolute spread of simplex values
  double init_step = 0.2;      // initial simplex edge in normalized coordinates
  int n_starts = 0;             // LHS seeding points; 0 = auto (max(8, 4 dim))
  int n_local = 2;              // how many of the best starts get a local search
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  int restarts = 0;
  double best_start_value = std::numeric_limits<double>::infinity();
};

// Bounded derivative-free minimization: Latin-hypercube seeding of the box,
// adaptive Nelder-Mead from the best seeds, and a fresh-simplex restart at the
// incumbent. The objective may return +inf to reject a point; candidates
// outside the box are never evaluated. Deterministic for a given seed.
MinimizeResult minimize_box(const std::function<double(const Eigen::VectorXd&)>& objective,
                            const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                            std::uint64_t seed, const NelderMeadOptions& options = {});

}  // namespace celltherm
