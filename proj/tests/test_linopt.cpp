#include <doctest.h>

#include "regmod/linopt.hpp"

using namespace regmod::linopt;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("solve_lp: small bounded program") {
  // min -x - 2y s.t. x + y <= 2.8, -x + y <= -0.4, x, y >= 0.
  LinearProgram lp;
  lp.c = VectorXd(2);
  lp.c << -1, -2;
  lp.A_in = MatrixXd(2, 2);
  lp.A_in << 1, 1, -1, 1;
  lp.b_in = VectorXd(2);
  lp.b_in << 2.8, -0.4;
  lp.nonneg = {true, true};
  const LpResult r = solve_lp(lp);
  REQUIRE(r.status == Status::optimal);
  CHECK(r.value == doctest::Approx(-4.0));
  CHECK(r.x(0) == doctest::Approx(1.6));
  CHECK(r.x(1) == doctest::Approx(1.2));
}

TEST_CASE("solve_lp: infeasible and unbounded programs") {
  LinearProgram inf;
  inf.c = VectorXd::Zero(1);
  inf.A_in = MatrixXd(2, 1);
  inf.A_in << 1, -1;
  inf.b_in = VectorXd(2);
  inf.b_in << 0, -1;  // x <= 0 and x >= 1
  CHECK(solve_lp(inf).status == Status::infeasible);

  LinearProgram unb;
  unb.c = VectorXd::Constant(1, -1.0);
  unb.nonneg = {true};
  CHECK(solve_lp(unb).status == Status::unbounded);
}

TEST_CASE("solve_qp: projection onto a polygon") {
  QuadraticProgram qp;
  qp.H = MatrixXd::Identity(2, 2);
  qp.g = VectorXd(2);
  qp.g << -3, -3;  // project (3,3)
  qp.A_in = MatrixXd(2, 2);
  qp.A_in << 1, 1, -1, 1;
  qp.b_in = VectorXd(2);
  qp.b_in << 2.8, -0.4;
  const QpResult r = solve_qp(qp);
  REQUIRE(r.status == Status::optimal);
  CHECK(r.x(0) == doctest::Approx(1.6));
  CHECK(r.x(1) == doctest::Approx(1.2));
}

TEST_CASE("nnls and cone ratio extremes") {
  MatrixXd A = MatrixXd::Identity(2, 2);
  VectorXd b(2);
  b << -1, 2;
  const VectorXd x = nnls(A, b);
  CHECK(x(0) == doctest::Approx(0.0));
  CHECK(x(1) == doctest::Approx(2.0));

  // Generators (1,0) and (0,1); ratio |v_1| / |v| ranges over [0, 1].
  MatrixXd M(1, 2);
  M << 1, 0;
  const RatioExtremes e = cone_ratio_extremes(MatrixXd::Identity(2, 2), M, MatrixXd::Identity(2, 2));
  CHECK(!e.empty);
  CHECK(e.inf_ratio == doctest::Approx(0.0));
  CHECK(e.sup_ratio == doctest::Approx(1.0));
}
