#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "regmod/moduli.hpp"
#include "regmod/report.hpp"

namespace regmod {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// {x : A x <= b}; refuses empty sets.
class Polyhedron {
 public:
  Polyhedron(MatrixXd A, VectorXd b);

  [[nodiscard]] int dim() const { return static_cast<int>(A_.cols()); }
  [[nodiscard]] int rows() const { return static_cast<int>(A_.rows()); }
  [[nodiscard]] const MatrixXd& A() const { return A_; }
  [[nodiscard]] const VectorXd& b() const { return b_; }
  [[nodiscard]] bool contains(const VectorXd& x, double tol = 1e-9) const;
  [[nodiscard]] std::vector<int> active_rows(const VectorXd& x, double tol = 1e-9) const;
  // Euclidean projection of p onto the set.
  [[nodiscard]] VectorXd project(const VectorXd& p) const;
  [[nodiscard]] double distance(const VectorXd& p) const { return (project(p) - p).norm(); }

 private:
  MatrixXd A_;
  VectorXd b_;
};

// All rows of both sets: the intersection.
Polyhedron intersect(const std::vector<Polyhedron>& sets);

// Conic hull of generators plus the span of lineality vectors (columns).
struct Cone {
  int dim = 0;
  MatrixXd generators;
  MatrixXd lineality;

  // Generators with each lineality vector added in both signs.
  [[nodiscard]] MatrixXd all_generators() const;
  [[nodiscard]] double distance(const VectorXd& v) const;
  [[nodiscard]] bool contains(const VectorXd& v, double tol = 1e-9) const { return distance(v) <= tol; }
  [[nodiscard]] bool is_trivial() const;
};

// Multifunction R^n => R^m whose graph is a polyhedron in R^(n+m), x coordinates first.
struct PolyMap {
  int n = 0;
  int m = 0;
  Polyhedron graph;

  PolyMap(int n_, int m_, Polyhedron g);
  static PolyMap linear(const MatrixXd& A);                       // y = A x
  static PolyMap affine(const MatrixXd& A, const VectorXd& c);    // y = A x + c
};

// Nonempty faces (exact active sets) of S whose closure meets the open ball B(center, r).
struct Face {
  std::vector<int> active;
  VectorXd nearest;  // point of the face closest to center
  double distance = 0.0;
};
std::vector<Face> faces_near(const Polyhedron& s, const VectorXd& center, double r);

Cone normal_cone_of_rows(const Polyhedron& s, const std::vector<int>& rows);
Cone frechet_normal_cone(const Polyhedron& s, const VectorXd& x);

// max over unit tangent directions of <x*, d>, clipped at 0: dist(x*, N(S,x)).
double eps_normal_value(const Polyhedron& s, const VectorXd& x, const VectorXd& xstar);
bool eps_normal_test(const Polyhedron& s, const VectorXd& x, const VectorXd& xstar, double eps);

// {P lambda : Q lambda = y*, lambda >= 0}: the x*-slice of the graph's normal cone.
struct CoderivativeSet {
  MatrixXd P;
  MatrixXd Q;
  VectorXd ystar;

  [[nodiscard]] bool is_empty() const;
  [[nodiscard]] bool contains(const VectorXd& xstar, double tol = 1e-9) const;
  // Coordinatewise min and max; +-inf when unbounded. Empty set gives min > max.
  [[nodiscard]] std::pair<VectorXd, VectorXd> bounds() const;
};
CoderivativeSet coderivative(const PolyMap& f, const VectorXd& x, const VectorXd& y, const VectorXd& ystar);

struct AlliednessResult {
  bool allied = false;
  double a = 0.0;                       // certified constant when allied
  double min_value = 0.0;               // inf ||sum x_i*|| / ||(x_1*,...,x_k*)||
  std::vector<VectorXd> counterexample;  // normals summing to zero when not allied
  std::size_t combinations = 0;
  [[nodiscard]] AuditReport to_report() const;
};
AlliednessResult alliedness_certificate(const std::vector<Polyhedron>& sets, const VectorXd& xbar, double r);

AuditReport metric_inequality_audit(const std::vector<Polyhedron>& sets, const VectorXd& xbar, double r, double tau,
                                    double grid_step);
AuditReport intersection_rule_audit(const std::vector<Polyhedron>& sets, const VectorXd& xbar, double r, double eps);

struct CompositionPoint {
  VectorXd x, y1, y2, z;
};

struct ConditionCResult {
  double c = 0.0;
  bool boundary_attained = false;  // some ||z_i*|| = delta at the minimizer
  bool degenerate = false;         // c = 0: no openness transmitted through G
  std::size_t combinations = 0;
};
ConditionCResult condition_C_value(const PolyMap& f1, const PolyMap& f2, const PolyMap& g,
                                   const CompositionPoint& base, double r, double delta);

// c at delta and delta/2 with the linear extrapolation 2 c(delta/2) - c(delta) to delta -> 0.
struct ConditionCLimit {
  double c_delta = 0.0;
  double c_half = 0.0;
  double limit = 0.0;
};
ConditionCLimit condition_C_limit(const PolyMap& f1, const PolyMap& f2, const PolyMap& g, const CompositionPoint& base,
                                  double r, double delta);

enum class EstimKind { aubin_upper, open_lower };
AuditReport estim_coder_audit(const PolyMap& f, const VectorXd& x, const VectorXd& y, double r, double alpha,
                              EstimKind which);
// G over (y1, y2) -> z with one argument frozen: fix_first freezes y1.
PolyMap slice_polymap(const PolyMap& g, int dim1, bool fix_first, const VectorXd& value);

// Sampled openness of H(x) = G(F1(x), F2(x)) at the base: for z' on a grid of step h with
// ||z' - z|| < a eps, D = d(x, H^-1(z')) is computed exactly and a violation is reported
// when ||z' - z|| / a < min(D, eps).
AuditReport condition_C_openness_audit(const PolyMap& f1, const PolyMap& f2, const PolyMap& g,
                                       const CompositionPoint& base, double a, double eps, double h);

}  // namespace regmod
