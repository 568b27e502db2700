#pragma once

#include <Eigen/Dense>

namespace ddag::lp {

enum class Status { optimal, infeasible, iteration_limit };

struct Options {
  // Primal feasibility tolerance on the constraint residual.
  double feasibility_tol = 1e-8;
  // Reduced-cost tolerance used by the ratio test.
  double optimality_tol = 1e-9;
  int max_iter = 50000;
  // Rebuild the tableau from scratch every this many pivots.
  int refactor_every = 64;
};

struct Result {
  Status status = Status::iteration_limit;
  Eigen::VectorXd x;
  // Multipliers of the dual problem  max b'y - lambda |y|_1  s.t. |A'y|_inf <= 1.
  Eigen::VectorXd y;
  double objective = 0.0;       // |x|_1
  double dual_objective = 0.0;  // b'y - lambda |y|_1
  double residual = 0.0;        // |A x - b|_inf
  int iterations = 0;
};

// Solves  min |x|_1  subject to  |A x - b|_inf <= lambda  (A square or
// rectangular, dense). The program is rewritten with x = x+ - x- and ranged
// slacks s in [0, 2 lambda]:
//
//   A x+ - A x- + s = b + lambda,   x+, x- >= 0,
//
// and solved with a bounded-variable dual simplex starting from the slack
// basis, which is dual feasible because every cost is nonnegative.
Result solve_l1_box(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double lambda,
                    const Options& options = {});

}  // namespace ddag::lp
