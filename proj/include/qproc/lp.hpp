#pragma once

#include <vector>

#include <Eigen/Dense>

namespace qproc {

struct FeasibilityResult {
  bool feasible = false;
  std::vector<double> x;         // a feasible point (when feasible)
  std::vector<double> farkas_y;  // y with y^T A <= 0, y^T b > 0 (when infeasible)
  double infeasibility = 0.0;    // phase-1 objective at termination
};

// Decide whether {x >= 0 : A x = b} is nonempty, for b >= 0, by a dense
// phase-1 primal simplex with Bland's rule (lowest index enters/leaves, so the
// run is deterministic and cycle-free). When the system is infeasible the
// simplex multipliers at the phase-1 optimum provide a Farkas certificate.
FeasibilityResult solve_equality_feasibility(const Eigen::MatrixXd& a,
                                             const Eigen::VectorXd& b,
                                             double tol = 1e-8);

}  // namespace qproc
