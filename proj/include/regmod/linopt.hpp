#pragma once

#include <vector>

#include <Eigen/Dense>

namespace regmod::linopt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// minimize c.x  subject to  A_eq x = b_eq,  A_in x <= b_in,  x_j >= 0 where nonneg[j].
// Empty matrices mean "no constraints of that kind"; an empty nonneg means all free.
struct LinearProgram {
  VectorXd c;
  MatrixXd A_eq;
  VectorXd b_eq;
  MatrixXd A_in;
  VectorXd b_in;
  std::vector<bool> nonneg;
};

enum class Status { optimal, infeasible, unbounded };

struct LpResult {
  Status status = Status::infeasible;
  double value = 0.0;
  VectorXd x;
};

// Dense two-phase simplex with Bland's rule. Sizes here are tens of variables.
LpResult solve_lp(const LinearProgram& lp);

// minimize 0.5 x'Hx + g'x  subject to  A_eq x = b_eq,  A_in x <= b_in.  H must be PSD;
// a tiny ridge keeps the KKT systems nonsingular when it is not definite.
struct QuadraticProgram {
  MatrixXd H;
  VectorXd g;
  MatrixXd A_eq;
  VectorXd b_eq;
  MatrixXd A_in;
  VectorXd b_in;
};

struct QpResult {
  Status status = Status::infeasible;
  double value = 0.0;
  VectorXd x;
};

// Primal active-set method started from an LP-feasible point. Throws SolverError when
// the iteration cap is hit.
QpResult solve_qp(const QuadraticProgram& qp);

// Lawson-Hanson nonnegative least squares: argmin ||A x - b|| over x >= 0.
VectorXd nnls(const MatrixXd& A, const VectorXd& b);

// Extremes of ||M v|| / ||D v|| over v in cone(columns of gens), v != 0, where
// v -> (Mv, Dv) is injective on the span of the generators.
struct RatioExtremes {
  bool empty = true;         // the cone is {0}
  double inf_ratio = 0.0;
  double sup_ratio = 0.0;    // +inf when some cone vector has Dv = 0
  VectorXd argmin;           // cone vector attaining the infimum
  VectorXd argmax;
};
RatioExtremes cone_ratio_extremes(const MatrixXd& gens, const MatrixXd& M, const MatrixXd& D);

}  // namespace regmod::linopt
