#include "regmod/coderiv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regmod/errors.hpp"
#include "regmod/linopt.hpp"
#include "regmod/tolerance.hpp"

namespace regmod {

namespace {

using linopt::LinearProgram;
using linopt::LpResult;
using linopt::QuadraticProgram;
using linopt::Status;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxFreeRows = 16;

double row_tol(double b, double tol) { return tol * (1.0 + std::fabs(b)); }

// min ||x - center||^2 over the face with the given rows held at equality.
std::optional<VectorXd> nearest_in_face(const Polyhedron& s, const std::vector<int>& eq, const VectorXd& center) {
  QuadraticProgram qp;
  const int n = s.dim();
  qp.H = MatrixXd::Identity(n, n);
  qp.g = -center;
  if (!eq.empty()) {
    qp.A_eq.resize(eq.size(), n);
    qp.b_eq.resize(eq.size());
    for (std::size_t k = 0; k < eq.size(); ++k) {
      qp.A_eq.row(k) = s.A().row(eq[k]);
      qp.b_eq(k) = s.b()(eq[k]);
    }
  }
  qp.A_in = s.A();
  qp.b_in = s.b();
  const auto r = linopt::solve_qp(qp);
  if (r.status != Status::optimal) return std::nullopt;
  return r.x;
}

// True when some point of S has exactly the rows in `eq` active.
bool exact_active_set(const Polyhedron& s, const std::vector<int>& eq) {
  const int n = s.dim();
  std::vector<char> in(s.rows(), 0);
  for (int i : eq) in[i] = 1;
  LinearProgram lp;
  lp.c = VectorXd::Zero(n + 1);
  lp.c(n) = -1.0;  // maximize t
  lp.A_eq = MatrixXd::Zero(eq.size(), n + 1);
  lp.b_eq = VectorXd::Zero(eq.size());
  for (std::size_t k = 0; k < eq.size(); ++k) {
    lp.A_eq.row(k).head(n) = s.A().row(eq[k]);
    lp.b_eq(k) = s.b()(eq[k]);
  }
  const int free_rows = s.rows() - static_cast<int>(eq.size());
  lp.A_in = MatrixXd::Zero(free_rows + 1, n + 1);
  lp.b_in = VectorXd::Zero(free_rows + 1);
  int k = 0;
  for (int i = 0; i < s.rows(); ++i) {
    if (in[i]) continue;
    lp.A_in.row(k).head(n) = s.A().row(i);
    lp.A_in(k, n) = 1.0;
    lp.b_in(k) = s.b()(i);
    ++k;
  }
  lp.A_in(k, n) = 1.0;
  lp.b_in(k) = 1.0;
  const LpResult r = linopt::solve_lp(lp);
  return r.status == Status::optimal && r.x(n) > 1e-9;
}

MatrixXd cols_of_rows(const MatrixXd& A, const std::vector<int>& rows) {
  MatrixXd g(A.cols(), rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) g.col(k) = A.row(rows[k]).transpose();
  return g;
}

// Block-diagonal placement of generator matrices into the stacked space.
MatrixXd stack_generators(const std::vector<MatrixXd>& parts) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& p : parts) {
    rows += p.rows();
    cols += p.cols();
  }
  MatrixXd out = MatrixXd::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const auto& p : parts) {
    out.block(r, c, p.rows(), p.cols()) = p;
    r += p.rows();
    c += p.cols();
  }
  return out;
}

// Advances a mixed-radix counter; false after the last combination.
bool next_combination(std::vector<std::size_t>& idx, const std::vector<std::size_t>& sizes) {
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (++idx[k] < sizes[k]) return true;
    idx[k] = 0;
  }
  return false;
}

// Lattice points center + h k inside the open ball of radius r.
std::vector<VectorXd> ball_grid(const VectorXd& center, double r, double h) {
  if (!(h > 0.0) || !(r > 0.0)) throw PreconditionError("grid step and radius must be positive");
  const int n = static_cast<int>(center.size());
  const long kmax = static_cast<long>(std::floor(r / h));
  double count = std::pow(double(2 * kmax + 1), n);
  if (count > 64.0 * double(enumeration_budget()))
    throw BudgetExceeded("grid of " + std::to_string(static_cast<long long>(count)) + " points exceeds the budget");
  std::vector<VectorXd> out;
  std::vector<long> k(n, -kmax);
  while (true) {
    VectorXd p = center;
    for (int i = 0; i < n; ++i) p(i) += h * double(k[i]);
    if ((p - center).norm() < r) out.push_back(p);
    int i = 0;
    for (; i < n; ++i) {
      if (++k[i] <= kmax) break;
      k[i] = -kmax;
    }
    if (i == n) break;
  }
  if (out.size() > enumeration_budget())
    throw BudgetExceeded("grid of " + std::to_string(out.size()) + " points exceeds the budget");
  return out;
}

}  // namespace

Polyhedron::Polyhedron(MatrixXd A, VectorXd b) : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != b_.size()) throw InputError("Polyhedron: one offset per row required");
  if (A_.cols() == 0) throw InputError("Polyhedron: dimension must be positive");
  if (!A_.allFinite() || !b_.allFinite()) throw InputError("Polyhedron: rows must be finite");
  if (A_.rows() > 0) {
    LinearProgram lp;
    lp.c = VectorXd::Zero(A_.cols());
    lp.A_in = A_;
    lp.b_in = b_;
    if (linopt::solve_lp(lp).status != Status::optimal) throw InputError("Polyhedron: empty set");
  }
}

bool Polyhedron::contains(const VectorXd& x, double tol) const {
  for (int i = 0; i < rows(); ++i)
    if (A_.row(i).dot(x) > b_(i) + row_tol(b_(i), tol)) return false;
  return true;
}

std::vector<int> Polyhedron::active_rows(const VectorXd& x, double tol) const {
  std::vector<int> out;
  for (int i = 0; i < rows(); ++i)
    if (std::fabs(A_.row(i).dot(x) - b_(i)) <= row_tol(b_(i), tol)) out.push_back(i);
  return out;
}

VectorXd Polyhedron::project(const VectorXd& p) const {
  if (rows() == 0 || contains(p, 0.0)) return p;
  auto r = nearest_in_face(*this, {}, p);
  if (!r) throw SolverError("projection subproblem infeasible");
  return *r;
}

Polyhedron intersect(const std::vector<Polyhedron>& sets) {
  if (sets.empty()) throw InputError("intersect: no sets");
  Eigen::Index rows = 0;
  for (const auto& s : sets) {
    if (s.dim() != sets.front().dim()) throw DomainMismatch("intersect: mixed dimensions");
    rows += s.rows();
  }
  MatrixXd A(rows, sets.front().dim());
  VectorXd b(rows);
  Eigen::Index r = 0;
  for (const auto& s : sets) {
    A.middleRows(r, s.rows()) = s.A();
    b.segment(r, s.rows()) = s.b();
    r += s.rows();
  }
  return Polyhedron(std::move(A), std::move(b));
}

MatrixXd Cone::all_generators() const {
  MatrixXd g(dim, generators.cols() + 2 * lineality.cols());
  if (generators.cols()) g.leftCols(generators.cols()) = generators;
  if (lineality.cols()) {
    g.middleCols(generators.cols(), lineality.cols()) = lineality;
    g.rightCols(lineality.cols()) = -lineality;
  }
  return g;
}

double Cone::distance(const VectorXd& v) const {
  const MatrixXd g = all_generators();
  if (g.cols() == 0) return v.norm();
  return (g * linopt::nnls(g, v) - v).norm();
}

bool Cone::is_trivial() const { return all_generators().cwiseAbs().sum() == 0.0; }

PolyMap::PolyMap(int n_, int m_, Polyhedron g) : n(n_), m(m_), graph(std::move(g)) {
  if (n <= 0 || m <= 0 || graph.dim() != n + m) throw InputError("PolyMap: graph dimension must be n + m");
}

PolyMap PolyMap::linear(const MatrixXd& A) { return affine(A, VectorXd::Zero(A.rows())); }

PolyMap PolyMap::affine(const MatrixXd& A, const VectorXd& c) {
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
  MatrixXd rows(2 * m, n + m);
  VectorXd b(2 * m);
  for (int i = 0; i < m; ++i) {
    // y_i - A_i x <= c_i and its negation.
    rows.row(2 * i).setZero();
    rows.row(2 * i).head(n) = -A.row(i);
    rows(2 * i, n + i) = 1.0;
    rows.row(2 * i + 1) = -rows.row(2 * i);
    b(2 * i) = c(i);
    b(2 * i + 1) = -c(i);
  }
  return PolyMap(n, m, Polyhedron(std::move(rows), std::move(b)));
}

std::vector<Face> faces_near(const Polyhedron& s, const VectorXd& center, double r) {
  std::vector<int> implicit, free_rows;
  for (int i = 0; i < s.rows(); ++i) {
    LinearProgram lp;
    lp.c = s.A().row(i).transpose();
    lp.A_in = s.A();
    lp.b_in = s.b();
    const LpResult res = linopt::solve_lp(lp);
    if (res.status == Status::optimal && res.value >= s.b()(i) - row_tol(s.b()(i), 1e-9)) implicit.push_back(i);
    else free_rows.push_back(i);
  }
  if (free_rows.size() > kMaxFreeRows) throw BudgetExceeded("faces_near: too many inequality rows");
  std::vector<Face> out;
  for (unsigned long mask = 0; mask < (1ul << free_rows.size()); ++mask) {
    std::vector<int> eq = implicit;
    for (std::size_t k = 0; k < free_rows.size(); ++k)
      if (mask & (1ul << k)) eq.push_back(free_rows[k]);
    std::sort(eq.begin(), eq.end());
    if (!exact_active_set(s, eq)) continue;
    auto p = nearest_in_face(s, eq, center);
    if (!p) continue;
    const double d = (*p - center).norm();
    if (d < r) out.push_back({eq, *p, d});
  }
  return out;
}

Cone normal_cone_of_rows(const Polyhedron& s, const std::vector<int>& rows) {
  Cone c;
  c.dim = s.dim();
  c.generators = cols_of_rows(s.A(), rows);
  c.lineality = MatrixXd(s.dim(), 0);
  return c;
}

Cone frechet_normal_cone(const Polyhedron& s, const VectorXd& x) {
  if (x.size() != s.dim() || !s.contains(x)) throw PreconditionError("frechet_normal_cone: point not in the set");
  return normal_cone_of_rows(s, s.active_rows(x));
}

double eps_normal_value(const Polyhedron& s, const VectorXd& x, const VectorXd& xstar) {
  return frechet_normal_cone(s, x).distance(xstar);
}

bool eps_normal_test(const Polyhedron& s, const VectorXd& x, const VectorXd& xstar, double eps) {
  if (eps < 0.0) throw PreconditionError("eps_normal_test: eps must be nonnegative");
  return eps_normal_value(s, x, xstar) <= eps + 1e-9;
}

bool CoderivativeSet::is_empty() const {
  LinearProgram lp;
  lp.c = VectorXd::Zero(Q.cols());
  lp.A_eq = Q;
  lp.b_eq = ystar;
  lp.nonneg.assign(Q.cols(), true);
  if (Q.cols() == 0) return ystar.norm() > 1e-12;
  return linopt::solve_lp(lp).status != Status::optimal;
}

bool CoderivativeSet::contains(const VectorXd& xstar, double tol) const {
  VectorXd target(xstar.size() + ystar.size());
  target << xstar, ystar;
  if (P.cols() == 0) return target.norm() <= tol;
  MatrixXd S(P.rows() + Q.rows(), P.cols());
  S << P, Q;
  return (S * linopt::nnls(S, target) - target).norm() <= tol * (1.0 + target.norm());
}

std::pair<VectorXd, VectorXd> CoderivativeSet::bounds() const {
  const Eigen::Index n = P.rows();
  VectorXd lo = VectorXd::Constant(n, kInf), hi = VectorXd::Constant(n, -kInf);
  if (is_empty()) return {lo, hi};
  if (P.cols() == 0) return {VectorXd::Zero(n), VectorXd::Zero(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      LinearProgram lp;
      lp.c = sign * P.row(i).transpose();
      lp.A_eq = Q;
      lp.b_eq = ystar;
      lp.nonneg.assign(P.cols(), true);
      const LpResult r = linopt::solve_lp(lp);
      const double v = r.status == Status::unbounded ? -kInf : r.value;
      if (sign > 0) lo(i) = v;
      else hi(i) = -v;
    }
  }
  return {lo, hi};
}

CoderivativeSet coderivative(const PolyMap& f, const VectorXd& x, const VectorXd& y, const VectorXd& ystar) {
  if (x.size() != f.n || y.size() != f.m || ystar.size() != f.m) throw InputError("coderivative: dimension mismatch");
  VectorXd p(f.n + f.m);
  p << x, y;
  if (!f.graph.contains(p)) throw PreconditionError("coderivative: point is off the graph");
  const MatrixXd g = cols_of_rows(f.graph.A(), f.graph.active_rows(p));
  return {g.topRows(f.n), -g.bottomRows(f.m), ystar};
}

AuditReport AlliednessResult::to_report() const {
  AuditReport rep;
  rep.kind = "alliedness_certificate";
  rep.value = a;
  rep.constants["a"] = a;
  rep.constants["min_value"] = min_value;
  rep.constants["combinations"] = double(combinations);
  if (!allied) {
    rep.verdict = Verdict::fail;
    for (std::size_t i = 0; i < counterexample.size(); ++i)
      rep.add_witness("normal_" + std::to_string(i),
                      std::vector<double>(counterexample[i].data(), counterexample[i].data() + counterexample[i].size()));
  }
  return rep;
}

AlliednessResult alliedness_certificate(const std::vector<Polyhedron>& sets, const VectorXd& xbar, double r) {
  if (sets.empty()) throw InputError("alliedness_certificate: no sets");
  for (const auto& s : sets)
    if (s.dim() != xbar.size() || !s.contains(xbar)) throw PreconditionError("alliedness_certificate: xbar not in every set");
  const std::size_t k = sets.size();
  const Eigen::Index n = xbar.size();
  std::vector<std::vector<MatrixXd>> cones(k);
  std::vector<std::size_t> sizes(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (const Face& f : faces_near(sets[i], xbar, r)) cones[i].push_back(cols_of_rows(sets[i].A(), f.active));
    sizes[i] = cones[i].size();
  }
  MatrixXd sum_map(n, n * Eigen::Index(k));
  for (std::size_t i = 0; i < k; ++i) sum_map.middleCols(n * Eigen::Index(i), n) = MatrixXd::Identity(n, n);
  const MatrixXd id = MatrixXd::Identity(n * Eigen::Index(k), n * Eigen::Index(k));

  AlliednessResult res;
  res.min_value = kInf;
  VectorXd arg;
  std::vector<std::size_t> idx(k, 0);
  do {
    std::vector<MatrixXd> parts(k);
    for (std::size_t i = 0; i < k; ++i) parts[i] = cones[i][idx[i]];
    const auto ext = linopt::cone_ratio_extremes(stack_generators(parts), sum_map, id);
    ++res.combinations;
    if (!ext.empty && ext.inf_ratio < res.min_value) {
      res.min_value = ext.inf_ratio;
      arg = ext.argmin;
    }
  } while (next_combination(idx, sizes));

  if (std::isinf(res.min_value)) {
    // No nonzero normals anywhere in the window: every constant works.
    res.allied = true;
    res.a = 1.0;
    return res;
  }
  if (res.min_value <= 1e-9) {
    res.allied = false;
    const double scale = arg.norm() > 0 ? 1.0 / arg.cwiseAbs().maxCoeff() : 1.0;
    for (std::size_t i = 0; i < k; ++i) res.counterexample.push_back(scale * arg.segment(n * Eigen::Index(i), n));
    return res;
  }
  res.allied = true;
  res.a = 1.0 / res.min_value;
  return res;
}

AuditReport metric_inequality_audit(const std::vector<Polyhedron>& sets, const VectorXd& xbar, double r, double tau,
                                    double grid_step) {
  const Polyhedron all = intersect(sets);
  if (!all.contains(xbar)) throw PreconditionError("metric_inequality_audit: xbar not in the intersection");
  AuditReport rep;
  rep.kind = "metric_inequality_audit";
  rep.window = {{"r", r}, {"grid_step", grid_step}};
  rep.constants["tau"] = tau;
  double worst = 0.0;
  VectorXd arg = xbar;
  const auto grid = ball_grid(xbar, r, grid_step);
  for (const VectorXd& x : grid) {
    double sum = 0.0;
    for (const auto& s : sets) sum += s.distance(x);
    const double lhs = all.distance(x);
    if (sum > 0.0 && lhs / sum > worst) {
      worst = lhs / sum;
      arg = x;
    }
    if (lhs > tau * sum + 1e-8 * (1.0 + lhs)) {
      rep.fail_with("point", std::vector<double>(x.data(), x.data() + x.size()));
      rep.constants["lhs"] = lhs;
      rep.constants["rhs"] = tau * sum;
    }
  }
  rep.value = worst;
  rep.constants["worst_ratio"] = worst;
  rep.constants["grid_points"] = double(grid.size());
  rep.add_witness("argmax", std::vector<double>(arg.data(), arg.data() + arg.size()));
  return rep;
}

AuditReport intersection_rule_audit(const std::vector<Polyhedron>& sets, const VectorXd& xbar, double r, double eps) {
  const Polyhedron all = intersect(sets);
  if (!all.contains(xbar)) throw PreconditionError("intersection_rule_audit: xbar not in the intersection");
  AuditReport rep;
  rep.kind = "intersection_rule_audit";
  rep.window = {{"r", r}, {"eps", eps}};
  std::vector<VectorXd> points{xbar};
  for (const Face& f : faces_near(all, xbar, r)) points.push_back(f.nearest);
  double worst = 0.0;
  for (const VectorXd& x : points) {
    Cone sum;
    sum.dim = all.dim();
    std::vector<MatrixXd> parts;
    Eigen::Index cols = 0;
    for (const auto& s : sets) {
      parts.push_back(cols_of_rows(s.A(), s.active_rows(x)));
      cols += parts.back().cols();
    }
    sum.generators.resize(all.dim(), cols);
    Eigen::Index c = 0;
    for (const auto& p : parts) {
      sum.generators.middleCols(c, p.cols()) = p;
      c += p.cols();
    }
    sum.lineality = MatrixXd(all.dim(), 0);
    for (int row : all.active_rows(x)) {
      const VectorXd g = all.A().row(row).transpose();
      if (g.norm() == 0.0) continue;
      const double d = sum.distance(g / g.norm());
      worst = std::max(worst, d);
      if (d > eps + 1e-9) {
        rep.fail_with("point,generator", [&] {
          std::vector<double> v(x.data(), x.data() + x.size());
          v.insert(v.end(), g.data(), g.data() + g.size());
          return v;
        }());
        return rep;
      }
    }
  }
  rep.value = worst;
  rep.constants["points"] = double(points.size());
  rep.constants["worst_distance"] = worst;
  return rep;
}

ConditionCResult condition_C_value(const PolyMap& f1, const PolyMap& f2, const PolyMap& g,
                                   const CompositionPoint& base, double r, double delta) {
  if (f1.n != f2.n || g.n != f1.m + f2.m) throw DomainMismatch("condition_C_value: dimensions do not compose");
  if (!(delta > 0.0) || !(r > 0.0)) throw PreconditionError("condition_C_value: r and delta must be positive");
  const int n = f1.n, m1 = f1.m, m2 = f2.m, p = g.m;
  VectorXd p1(n + m1), p2(n + m2), p3(m1 + m2 + p);
  p1 << base.x, base.y1;
  p2 << base.x, base.y2;
  p3 << base.y1, base.y2, base.z;
  if (!f1.graph.contains(p1) || !f2.graph.contains(p2) || !g.graph.contains(p3))
    throw PreconditionError("condition_C_value: base is off a graph");

  const auto faces1 = faces_near(f1.graph, p1, r);
  const auto faces2 = faces_near(f2.graph, p2, r);
  const auto faces3 = faces_near(g.graph, p3, r);

  // Unit w* directions: exact for a one-dimensional Z, a fixed sample otherwise.
  std::vector<VectorXd> ws;
  for (int i = 0; i < p; ++i)
    for (double s : {1.0, -1.0}) ws.push_back(s * VectorXd::Unit(p, i));
  if (p > 1) {
    for (int mask = 0; mask < (1 << p); ++mask) {
      VectorXd w(p);
      for (int i = 0; i < p; ++i) w(i) = (mask & (1 << i)) ? -1.0 : 1.0;
      ws.push_back(w / w.norm());
    }
  }

  ConditionCResult res;
  res.c = kInf;
  const double box1 = delta / std::sqrt(double(m1));
  const double box2 = delta / std::sqrt(double(m2));
  for (const Face& a : faces1)
    for (const Face& b : faces2)
      for (const Face& c : faces3) {
        ++res.combinations;
        const MatrixXd G1 = cols_of_rows(f1.graph.A(), a.active);
        const MatrixXd G2 = cols_of_rows(f2.graph.A(), b.active);
        const MatrixXd G3 = cols_of_rows(g.graph.A(), c.active);
        const Eigen::Index k1 = G1.cols(), k2 = G2.cols(), k3 = G3.cols(), k = k1 + k2 + k3;
        // x1* + x2* = Mx lambda;  z_i* = Z_i lambda;  w* = W lambda.
        MatrixXd Mx = MatrixXd::Zero(n, k), Z1 = MatrixXd::Zero(m1, k), Z2 = MatrixXd::Zero(m2, k), W = MatrixXd::Zero(p, k);
        Mx.leftCols(k1) = G1.topRows(n);
        Mx.middleCols(k1, k2) = G2.topRows(n);
        Z1.leftCols(k1) = G1.bottomRows(m1);
        Z1.rightCols(k3) = G3.topRows(m1);
        Z2.middleCols(k1, k2) = G2.bottomRows(m2);
        Z2.rightCols(k3) = G3.middleRows(m1, m2);
        W.rightCols(k3) = -G3.bottomRows(p);
        for (const VectorXd& w : ws) {
          QuadraticProgram qp;
          qp.H = Mx.transpose() * Mx;
          qp.g = VectorXd::Zero(k);
          qp.A_eq = W;
          qp.b_eq = w;
          qp.A_in = MatrixXd::Zero(k + 2 * (m1 + m2), k);
          qp.b_in = VectorXd::Zero(k + 2 * (m1 + m2));
          qp.A_in.topRows(k) = -MatrixXd::Identity(k, k);
          qp.A_in.middleRows(k, m1) = Z1;
          qp.A_in.middleRows(k + m1, m1) = -Z1;
          qp.A_in.middleRows(k + 2 * m1, m2) = Z2;
          qp.A_in.middleRows(k + 2 * m1 + m2, m2) = -Z2;
          qp.b_in.segment(k, 2 * m1).setConstant(box1);
          qp.b_in.segment(k + 2 * m1, 2 * m2).setConstant(box2);
          const auto sol = linopt::solve_qp(qp);
          if (sol.status != Status::optimal) continue;
          const double val = (Mx * sol.x).norm();
          if (val < res.c) {
            res.c = val;
            const double z1 = m1 ? (Z1 * sol.x).cwiseAbs().maxCoeff() : 0.0;
            const double z2 = m2 ? (Z2 * sol.x).cwiseAbs().maxCoeff() : 0.0;
            res.boundary_attained = z1 >= box1 - 1e-9 || z2 >= box2 - 1e-9;
          }
        }
      }
  res.degenerate = res.c <= 1e-9;
  return res;
}

ConditionCLimit condition_C_limit(const PolyMap& f1, const PolyMap& f2, const PolyMap& g, const CompositionPoint& base,
                                  double r, double delta) {
  ConditionCLimit out;
  out.c_delta = condition_C_value(f1, f2, g, base, r, delta).c;
  out.c_half = condition_C_value(f1, f2, g, base, r, delta / 2.0).c;
  out.limit = 2.0 * out.c_half - out.c_delta;
  return out;
}

AuditReport estim_coder_audit(const PolyMap& f, const VectorXd& x, const VectorXd& y, double r, double alpha,
                              EstimKind which) {
  VectorXd p(f.n + f.m);
  p << x, y;
  if (!f.graph.contains(p)) throw PreconditionError("estim_coder_audit: base is off the graph");
  if (!(alpha > 0.0)) throw PreconditionError("estim_coder_audit: alpha must be positive");
  AuditReport rep;
  rep.kind = which == EstimKind::aubin_upper ? "estim_coder_audit:aubin-upper" : "estim_coder_audit:open-lower";
  rep.window = {{"r", r}};
  rep.constants["alpha"] = alpha;
  MatrixXd Mx = MatrixXd::Zero(f.n, f.n + f.m), My = MatrixXd::Zero(f.m, f.n + f.m);
  Mx.leftCols(f.n) = MatrixXd::Identity(f.n, f.n);
  My.rightCols(f.m) = MatrixXd::Identity(f.m, f.m);
  double sup = 0.0, inf = kInf;
  VectorXd arg_sup, arg_inf;
  Cone whole;
  whole.dim = f.n + f.m;
  whole.lineality = MatrixXd(whole.dim, 0);
  for (const Face& face : faces_near(f.graph, p, r)) {
    const MatrixXd gens = cols_of_rows(f.graph.A(), face.active);
    const auto ext = linopt::cone_ratio_extremes(gens, Mx, My);
    if (ext.empty) continue;
    if (ext.sup_ratio > sup) {
      sup = ext.sup_ratio;
      arg_sup = ext.argmax;
      whole.generators = gens;
    }
    if (ext.inf_ratio < inf) {
      inf = ext.inf_ratio;
      arg_inf = ext.argmin;
    }
  }
  rep.constants["sup_ratio"] = sup;
  rep.constants["inf_ratio"] = inf;
  // Report the pair as (y*, x*) with ||y*|| = 1, where (x*, -y*) is the normal.
  auto witness = [&](const VectorXd& v) {
    std::vector<double> out;
    const VectorXd ys = -v.tail(f.m);
    const double s = ys.norm() > 0 ? 1.0 / ys.norm() : 1.0;
    for (Eigen::Index i = 0; i < f.m; ++i) out.push_back(s * ys(i));
    for (Eigen::Index i = 0; i < f.n; ++i) out.push_back(s * v(i));
    return out;
  };
  if (which == EstimKind::aubin_upper) {
    rep.value = sup;
    if (arg_sup.size()) rep.add_witness("y*,x*", witness(arg_sup));
    if (sup > alpha * (1.0 + 1e-9) + 1e-12) rep.verdict = Verdict::fail;
  } else {
    rep.value = inf;
    if (arg_inf.size()) rep.add_witness("y*,x*", witness(arg_inf));
    if (inf < alpha * (1.0 - 1e-9) - 1e-12) rep.verdict = Verdict::fail;
  }
  return rep;
}

PolyMap slice_polymap(const PolyMap& g, int dim1, bool fix_first, const VectorXd& value) {
  const int dim2 = g.n - dim1;
  if (dim1 <= 0 || dim2 <= 0) throw InputError("slice_polymap: both argument blocks must be nonempty");
  const int fixed = fix_first ? dim1 : dim2;
  if (value.size() != fixed) throw InputError("slice_polymap: value has the wrong dimension");
  const int moving = g.n - fixed;
  const MatrixXd& A = g.graph.A();
  MatrixXd rows(A.rows(), moving + g.m);
  VectorXd b = g.graph.b();
  const int fixed_at = fix_first ? 0 : dim1;
  const int moving_at = fix_first ? dim1 : 0;
  rows.leftCols(moving) = A.middleCols(moving_at, moving);
  rows.rightCols(g.m) = A.rightCols(g.m);
  b -= A.middleCols(fixed_at, fixed) * value;
  return PolyMap(moving, g.m, Polyhedron(std::move(rows), std::move(b)));
}

AuditReport condition_C_openness_audit(const PolyMap& f1, const PolyMap& f2, const PolyMap& g,
                                       const CompositionPoint& base, double a, double eps, double h) {
  if (f1.n != f2.n || g.n != f1.m + f2.m) throw DomainMismatch("condition_C_openness_audit: dimensions do not compose");
  if (!(a > 0.0) || !(eps > 0.0)) throw PreconditionError("condition_C_openness_audit: a and eps must be positive");
  const int n = f1.n, m1 = f1.m, m2 = f2.m, p = g.m, N = n + m1 + m2 + p;
  // Lifted graph in (x, y1, y2, z).
  MatrixXd L = MatrixXd::Zero(f1.graph.rows() + f2.graph.rows() + g.graph.rows(), N);
  VectorXd lb(L.rows());
  int r = 0;
  for (int i = 0; i < f1.graph.rows(); ++i, ++r) {
    L.row(r).head(n) = f1.graph.A().row(i).head(n);
    L.row(r).segment(n, m1) = f1.graph.A().row(i).tail(m1);
    lb(r) = f1.graph.b()(i);
  }
  for (int i = 0; i < f2.graph.rows(); ++i, ++r) {
    L.row(r).head(n) = f2.graph.A().row(i).head(n);
    L.row(r).segment(n + m1, m2) = f2.graph.A().row(i).tail(m2);
    lb(r) = f2.graph.b()(i);
  }
  for (int i = 0; i < g.graph.rows(); ++i, ++r) {
    L.row(r).segment(n, m1 + m2 + p) = g.graph.A().row(i);
    lb(r) = g.graph.b()(i);
  }
  AuditReport rep;
  rep.kind = "condition_C_openness_audit";
  rep.window = {{"eps", eps}, {"grid_step", h}};
  rep.constants["a"] = a;
  double rate = kInf;
  std::size_t samples = 0;
  for (const VectorXd& zp : ball_grid(base.z, a * eps, h)) {
    const double dz = (zp - base.z).norm();
    if (dz == 0.0) continue;
    ++samples;
    QuadraticProgram qp;
    qp.H = MatrixXd::Zero(N, N);
    qp.H.topLeftCorner(n, n) = MatrixXd::Identity(n, n);
    qp.g = VectorXd::Zero(N);
    qp.g.head(n) = -base.x;
    qp.A_eq = MatrixXd::Zero(p, N);
    qp.A_eq.rightCols(p) = MatrixXd::Identity(p, p);
    qp.b_eq = zp;
    qp.A_in = L;
    qp.b_in = lb;
    const auto sol = linopt::solve_qp(qp);
    const double D = sol.status == Status::optimal ? (sol.x.head(n) - base.x).norm() : kInf;
    if (D > 0.0) rate = std::min(rate, dz / D);
    if (dz / a < std::min(D, eps) - 1e-9) {
      std::vector<double> w(zp.data(), zp.data() + zp.size());
      w.push_back(D);
      rep.fail_with("z',distance", w);
      break;
    }
  }
  rep.value = rate;
  rep.constants["measured_rate"] = rate;
  rep.constants["samples"] = double(samples);
  rep.constants["discretization"] = h;
  return rep;
}

}  // namespace regmod
