#pragma once

#include <Eigen/Dense>
#include <string>

namespace qdesign {

// Strictly convex QP with inequality constraints:
//
//   minimize    0.5 x' G x + g0' x
//   subject to  CI' x + ci0 >= 0        (one column of CI per constraint)
//
// Solved by the Goldfarb-Idnani dual active-set method, which starts from the
// unconstrained minimizer and adds violated constraints one at a time.
struct QpProblem {
  Eigen::MatrixXd G;
  Eigen::VectorXd g0;
  Eigen::MatrixXd CI;
  Eigen::VectorXd ci0;
};

struct QpSolution {
  bool ok = false;
  std::string message;
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  // one per constraint, zero when inactive
  double objective = 0.0;
  int iterations = 0;
};

QpSolution solve_qp(const QpProblem& problem, int max_iterations = 10000);

}  // namespace qdesign
