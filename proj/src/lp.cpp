#include "qproc/lp.hpp"

#include <stdexcept>

namespace qproc {

FeasibilityResult solve_equality_feasibility(const Eigen::MatrixXd& a,
                                             const Eigen::VectorXd& b,
                                             double tol) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (b.size() != m) throw std::invalid_argument("solve_equality_feasibility: size mismatch");
  for (int i = 0; i < m; ++i) {
    if (b(i) < -1e-12) throw std::invalid_argument("solve_equality_feasibility: requires b >= 0");
  }

  // Tableau columns: n structural + m artificial, plus rhs. Artificials start
  // basic, so phase 1 minimizes their sum.
  Eigen::MatrixXd t(m, n + m + 1);
  t.block(0, 0, m, n) = a;
  t.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
  t.col(n + m) = b.cwiseMax(0.0);
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  const double pivot_tol = 1e-11;
  const long long max_pivots = 2000LL + 50LL * (static_cast<long long>(m) + n) *
                                            (static_cast<long long>(m) + n);
  for (long long pivots = 0; pivots < max_pivots; ++pivots) {
    // Reduced cost of column j for cost = sum of artificial variables:
    // c_j - sum over rows whose basic variable is artificial of t(i, j).
    int enter = -1;
    for (int j = 0; j < n + m; ++j) {
      double cj = (j >= n) ? 1.0 : 0.0;
      double reduced = cj;
      for (int i = 0; i < m; ++i) {
        if (basis[i] >= n) reduced -= t(i, j);
      }
      if (reduced < -pivot_tol) {
        enter = j;  // Bland: lowest index
        break;
      }
    }
    if (enter < 0) break;  // optimal

    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (t(i, enter) > pivot_tol) {
        double ratio = t(i, n + m) / t(i, enter);
        if (leave < 0 || ratio < best_ratio - 1e-15 ||
            (ratio < best_ratio + 1e-15 && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) break;  // unbounded column; cannot happen in phase 1

    // Pivot.
    t.row(leave) /= t(leave, enter);
    for (int i = 0; i < m; ++i) {
      if (i != leave && std::abs(t(i, enter)) > 0.0) {
        t.row(i) -= t(i, enter) * t.row(leave);
      }
    }
    basis[leave] = enter;
  }

  double objective = 0.0;
  for (int i = 0; i < m; ++i) {
    if (basis[i] >= n) objective += t(i, n + m);
  }

  FeasibilityResult res;
  res.infeasibility = objective;
  if (objective <= tol) {
    res.feasible = true;
    res.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i) {
      if (basis[i] < n) res.x[basis[i]] = t(i, n + m);
    }
  } else {
    // Simplex multipliers y_i = c_B^T B^{-1} e_i, read off the artificial
    // columns of the final tableau. At the phase-1 optimum y^T A <= 0
    // componentwise while y^T b equals the positive objective.
    res.farkas_y.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
      double yi = 0.0;
      for (int r = 0; r < m; ++r) {
        if (basis[r] >= n) yi += t(r, n + i);
      }
      res.farkas_y[i] = yi;
    }
  }
  return res;
}

}  // namespace qproc
