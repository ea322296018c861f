#pragma once

// Exhaustive active-set solver for tiny SVM duals:
//   min 1/2 a'Qa - 1'a  s.t.  y'a = 0,  0 <= a_i <= U_i,  Q_ij = y_i y_j K_ij.
// Every split of the variables into {at 0, free, at bound} is tried; the free
// block is solved from its KKT system and the best feasible point is kept.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct QpSolution {
  std::vector<double> alpha;
  double objective = std::numeric_limits<double>::infinity();  // primal form, minimised
};

inline double dual_objective(const Eigen::MatrixXd& Q, const std::vector<double>& a) {
  const Eigen::Map<const Eigen::VectorXd> v(a.data(), static_cast<Eigen::Index>(a.size()));
  return 0.5 * v.dot(Q * v) - v.sum();
}

inline std::optional<QpSolution> solve_svm_dual(const Eigen::MatrixXd& K, const std::vector<double>& y,
                                                const std::vector<double>& upper, double feas_tol = 1e-9) {
  const auto n = static_cast<int>(y.size());
  if (n > 10) return std::nullopt;
  Eigen::MatrixXd Q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Q(i, j) = y[i] * y[j] * K(i, j);

  std::optional<QpSolution> best;
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;
  for (int code = 0; code < combos; ++code) {
    std::vector<int> state(n);  // 0: at zero, 1: free, 2: at upper bound
    for (int i = 0, c = code; i < n; ++i, c /= 3) state[i] = c % 3;

    std::vector<double> a(n, 0.0);
    std::vector<int> free;
    for (int i = 0; i < n; ++i) {
      if (state[i] == 2) a[i] = upper[i];
      if (state[i] == 1) free.push_back(i);
    }
    const auto f = static_cast<int>(free.size());
    if (f > 0) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(f + 1, f + 1);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(f + 1);
      for (int r = 0; r < f; ++r) {
        double fixed = 0.0;
        for (int j = 0; j < n; ++j)
          if (state[j] == 2) fixed += Q(free[r], j) * a[j];
        for (int c = 0; c < f; ++c) A(r, c) = Q(free[r], free[c]);
        A(r, f) = y[free[r]];
        A(f, r) = y[free[r]];
        b(r) = 1.0 - fixed;
      }
      double fixed_sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (state[j] == 2) fixed_sum += y[j] * a[j];
      b(f) = -fixed_sum;
      const Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(b);
      if ((A * sol - b).norm() > 1e-8) continue;
      for (int r = 0; r < f; ++r) a[free[r]] = sol(r);
    }
    bool feasible = true;
    double eq = 0.0;
    for (int i = 0; i < n; ++i) {
      if (a[i] < -feas_tol || a[i] > upper[i] + feas_tol) feasible = false;
      eq += y[i] * a[i];
    }
    if (!feasible || std::fabs(eq) > 1e-8) continue;
    const double obj = dual_objective(Q, a);
    if (!best || obj < best->objective) best = QpSolution{a, obj};
  }
  return best;
}

}  // namespace oracle
