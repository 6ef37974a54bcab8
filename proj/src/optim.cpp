#include "celltherm/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "celltherm/rng.hpp"
#include "celltherm/types.hpp"

namespace celltherm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Tracker {
  const std::function<double(const Eigen::VectorXd&)>* f = nullptr;
  Eigen::VectorXd lower, upper;
  int evaluations = 0;
  Eigen::VectorXd best_x;
  double best_value = kInf;

  // y lives in the unit box; out-of-box candidates are rejected unevaluated.
  double eval(const Eigen::VectorXd& y) {
    if ((y.array() < 0.0).any() || (y.array() > 1.0).any()) return kInf;
    const Eigen::VectorXd x = lower + y.cwiseProduct(upper - lower);
    const double v = (*f)(x);
    ++evaluations;
    if (v < best_value) {
      best_value = v;
      best_x = x;
    }
    return v;
  }
};

// One adaptive Nelder-Mead run from y0; updates the tracker's incumbent.
void nelder_mead(Tracker& tracker, const Eigen::VectorXd& y0, double init_step,
                 int max_evals, double x_tol, double f_tol) {
  const int dim = static_cast<int>(y0.size());
  // dimension-adaptive coefficients
  const double refl = 1.0;
  const double expa = 1.0 + 2.0 / dim;
  const double contr = 0.75 - 1.0 / (2.0 * dim);
  const double shrink = 1.0 - 1.0 / dim;

  std::vector<Eigen::VectorXd> pts(dim + 1, y0);
  std::vector<double> vals(dim + 1);
  for (int i = 0; i < dim; ++i) {
    double step = init_step;
    if (y0(i) + step > 1.0) step = -init_step;  // reflect into the box
    pts[i + 1](i) = std::clamp(y0(i) + step, 0.0, 1.0);
  }
  for (int i = 0; i <= dim; ++i) vals[i] = tracker.eval(pts[i]);

  std::vector<int> order(dim + 1);
  const int eval_budget = tracker.evaluations + max_evals;
  while (tracker.evaluations < eval_budget) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return vals[a] < vals[b]; });
    const int lo = order[0], hi = order[dim], second_hi = order[dim - 1];

    double diameter = 0.0;
    for (int i = 1; i <= dim; ++i) {
      diameter = std::max(diameter, (pts[order[i]] - pts[lo]).cwiseAbs().maxCoeff());
    }
    const bool flat = std::isfinite(vals[hi]) && vals[hi] - vals[lo] < f_tol;
    if (diameter < x_tol && (flat || !std::isfinite(vals[hi]))) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i <= dim; ++i) {
      if (i != hi) centroid += pts[i];
    }
    centroid /= dim;

    const Eigen::VectorXd reflected = centroid + refl * (centroid - pts[hi]);
    const double f_reflected = tracker.eval(reflected);

    if (f_reflected < vals[lo]) {
      const Eigen::VectorXd expanded = centroid + expa * (reflected - centroid);
      const double f_expanded = tracker.eval(expanded);
      if (f_expanded < f_reflected) {
        pts[hi] = expanded;
        vals[hi] = f_expanded;
      } else {
        pts[hi] = reflected;
        vals[hi] = f_reflected;
      }
      continue;
    }
    if (f_reflected < vals[second_hi]) {
      pts[hi] = reflected;
      vals[hi] = f_reflected;
      continue;
    }
    if (f_reflected < vals[hi]) {
      // outside contraction
      const Eigen::VectorXd point = centroid + contr * (reflected - centroid);
      const double value = tracker.eval(point);
      if (value <= f_reflected) {
        pts[hi] = point;
        vals[hi] = value;
        continue;
      }
    } else {
      // inside contraction
      const Eigen::VectorXd point = centroid - contr * (centroid - pts[hi]);
      const double value = tracker.eval(point);
      if (value < vals[hi]) {
        pts[hi] = point;
        vals[hi] = value;
        continue;
      }
    }
    for (int i = 0; i <= dim; ++i) {
      if (i == lo) continue;
      pts[i] = pts[lo] + shrink * (pts[i] - pts[lo]);
      vals[i] = tracker.eval(pts[i]);
    }
  }
}

}  // namespace

MinimizeResult minimize_box(const std::function<double(const Eigen::VectorXd&)>& objective,
                            const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                            std::uint64_t seed, const NelderMeadOptions& options) {
  const int dim = static_cast<int>(lower.size());
  if (dim < 1 || upper.size() != dim) throw DomainError("minimize_box: bad bounds");
  if (((upper - lower).array() <= 0.0).any()) {
    throw DomainError("minimize_box: need lower < upper in every coordinate");
  }

  Tracker tracker;
  tracker.f = &objective;
  tracker.lower = lower;
  tracker.upper = upper;

  const int n_starts = options.n_starts > 0 ? options.n_starts : std::max(8, 4 * dim);
  const int max_evals =
      options.max_evals_per_start > 0 ? options.max_evals_per_start : 500 * dim;

  // Latin hypercube: one stratum per start per coordinate, shuffled.
  Rng rng(seed);
  Eigen::MatrixXd strata(n_starts, dim);
  for (int c = 0; c < dim; ++c) {
    std::vector<int> perm(n_starts);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n_starts - 1; i > 0; --i) {
      std::swap(perm[i], perm[static_cast<int>(rng.uniform_int(0, i))]);
    }
    for (int s = 0; s < n_starts; ++s) {
      strata(s, c) = (perm[s] + rng.uniform()) / n_starts;
    }
  }

  std::vector<std::pair<double, int>> starts(n_starts);
  for (int s = 0; s < n_starts; ++s) {
    starts[s] = {tracker.eval(strata.row(s).transpose()), s};
  }
  std::stable_sort(starts.begin(), starts.end());
  const double best_start = starts.front().first;

  const int n_local = std::min(options.n_local, n_starts);
  for (int i = 0; i < n_local; ++i) {
    if (!std::isfinite(starts[i].first)) break;
    nelder_mead(tracker, strata.row(starts[i].second).transpose(), options.init_step,
                max_evals, options.x_tol, options.f_tol);
  }
  if (!std::isfinite(tracker.best_value)) {
    throw NumericalError("minimize_box: no finite objective value found in the box");
  }

  // fresh-simplex restart at the incumbent
  const Eigen::VectorXd incumbent =
      (tracker.best_x - lower).cwiseQuotient(upper - lower);
  nelder_mead(tracker, incumbent, options.init_step / 4.0, max_evals / 2,
              options.x_tol, options.f_tol);

  MinimizeResult result;
  result.x = tracker.best_x;
  result.value = tracker.best_value;
  result.evaluations = tracker.evaluations;
  result.restarts = 1;
  result.best_start_value = best_start;
  return result;
}

}  // namespace celltherm
