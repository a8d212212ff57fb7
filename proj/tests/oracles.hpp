#pragma once

// Independent oracles used by the test suites. Everything here is kept
// separate from the library's solution paths on purpose: value iteration
// on a discretized wage grid instead of the fixed-point map, explicit
// dummy-variable least squares instead of alternating projections.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "cohortlab/search_model.hpp"

namespace cohortlab::oracles {

// Reservation earnings by Bellman iteration on a wage grid. Employment is
// absorbing, so V_F(w) = w/(1-beta) and V_P(w) = theta*w/(1-beta); the
// unemployment value is iterated on directly and R = (1-beta)*U.
// Grid cells are midpoints with exact CDF mass, which keeps the
// discretization error of order (grid spacing)^2.
inline double value_iteration_reservation(const SearchEnvironment& env, const Beliefs& beliefs,
                                          int grid_points = 10001, double tol = 1e-12,
                                          int max_iterations = 5000000) {
  const double lo = env.wage_dist.support_min();
  const double hi = env.wage_dist.support_max();
  const int n = grid_points;
  std::vector<double> wage(n), mass(n);
  for (int i = 0; i < n; ++i) {
    const double left = lo + (hi - lo) * i / n;
    const double right = lo + (hi - lo) * (i + 1) / n;
    wage[i] = 0.5 * (left + right);
    mass[i] = env.wage_dist.cdf(right) - env.wage_dist.cdf(left);
  }

  const double beta = env.beta;
  double u = env.b / (1.0 - beta);  // start from the never-accept value
  for (int it = 0; it < max_iterations; ++it) {
    double e_ft = 0.0, e_pt = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v_ft = wage[i] / (1.0 - beta);
      const double v_pt = env.theta * wage[i] / (1.0 - beta);
      e_ft += mass[i] * std::max(v_ft, u);
      e_pt += mass[i] * std::max(v_pt, u);
    }
    const double u_next =
        env.b +
        beta * beliefs.alpha * (beliefs.gamma * e_pt + (1.0 - beliefs.gamma) * e_ft) +
        beta * (1.0 - beliefs.alpha) * u;
    const double diff = std::fabs(u_next - u);
    u = u_next;
    if (diff < tol) break;
  }
  return (1.0 - beta) * u;
}

// Ordinary least squares by explicit design matrix and QR decomposition.
// Returns the coefficient vector for columns of X (no intercept added).
inline Eigen::VectorXd dense_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return x.colPivHouseholderQr().solve(y);
}

}  // namespace cohortlab::oracles
