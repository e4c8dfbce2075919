#include <doctest.h>

#include <cmath>
#include <random>

#include "regmod/coderiv.hpp"
#include "regmod/errors.hpp"
#include "regmod/generators.hpp"
#include "support.hpp"

using namespace regmod;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(v.size());
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Polyhedron halfspaces(std::initializer_list<std::initializer_list<double>> rows, std::initializer_list<double> b) {
  MatrixXd A(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& r : rows) A.row(i++) = vec(r).transpose();
  return Polyhedron(A, vec(b));
}

Polyhedron x_axis() { return halfspaces({{0, 1}, {0, -1}}, {0, 0}); }
Polyhedron y_axis() { return halfspaces({{1, 0}, {-1, 0}}, {0, 0}); }

PolyMap scalar(double a) { return PolyMap::linear(MatrixXd::Constant(1, 1, a)); }
PolyMap sum_map() {
  MatrixXd g(1, 2);
  g << 1, 1;
  return PolyMap::linear(g);
}

CompositionPoint origin() { return {VectorXd::Zero(1), VectorXd::Zero(1), VectorXd::Zero(1), VectorXd::Zero(1)}; }

}  // namespace

TEST_CASE("frechet_normal_cone examples") {
  const Polyhedron half = halfspaces({{1, 0}}, {0});
  const Cone c = frechet_normal_cone(half, vec({0, 3}));
  REQUIRE(c.generators.cols() == 1);
  CHECK(c.generators.col(0) == vec({1, 0}));
  CHECK(frechet_normal_cone(half, vec({-1, 0})).is_trivial());
  const Cone corner = frechet_normal_cone(halfspaces({{1, 0}, {0, 1}}, {0, 0}), vec({0, 0}));
  CHECK(corner.generators.cols() == 2);
  CHECK(corner.contains(vec({2, 3})));
  CHECK(!corner.contains(vec({-1, 1})));
  CHECK_THROWS_AS(frechet_normal_cone(half, vec({1, 0})), PreconditionError);
}

TEST_CASE("eps_normal_test examples") {
  const Polyhedron half = halfspaces({{1, 0}}, {0});
  CHECK(eps_normal_test(half, vec({0, 0}), vec({4, 0}), 0.0));
  CHECK(!eps_normal_test(half, vec({-1, 0}), vec({1, 0}), 0.0));
  CHECK(eps_normal_test(half, vec({-1, 0}), vec({1, 0}), 1.0));
  CHECK(eps_normal_value(half, vec({-1, 0}), vec({1, 0})) == doctest::Approx(1.0));
}

TEST_CASE("coderivative examples") {
  const CoderivativeSet d = coderivative(scalar(2.0), vec({0}), vec({0}), vec({1}));
  CHECK(d.contains(vec({2})));
  CHECK(!d.contains(vec({1})));
  const auto [lo, hi] = d.bounds();
  CHECK(lo(0) == doctest::Approx(2.0));
  CHECK(hi(0) == doctest::Approx(2.0));

  const CoderivativeSet id = coderivative(scalar(1.0), vec({1}), vec({1}), vec({-3}));
  CHECK(id.contains(vec({-3})));

  const PolyMap zero = PolyMap::affine(MatrixXd::Zero(1, 1), VectorXd::Zero(1));
  for (double ys : {-2.0, 0.5, 7.0}) {
    const CoderivativeSet z = coderivative(zero, vec({4}), vec({0}), vec({ys}));
    const auto [l, h] = z.bounds();
    CHECK(l(0) == doctest::Approx(0.0));
    CHECK(h(0) == doctest::Approx(0.0));
  }
  CHECK_THROWS_AS(coderivative(scalar(2.0), vec({1}), vec({1}), vec({1})), PreconditionError);
}

TEST_CASE("alliedness_certificate examples") {
  const AlliednessResult axes = alliedness_certificate({x_axis(), y_axis()}, vec({0, 0}), 1.0);
  CHECK(axes.allied);
  CHECK(axes.min_value == doctest::Approx(1.0));
  CHECK(axes.a == doctest::Approx(1.0));

  const AlliednessResult dup = alliedness_certificate({x_axis(), x_axis()}, vec({0, 0}), 1.0);
  CHECK(!dup.allied);
  REQUIRE(dup.counterexample.size() == 2);
  CHECK(dup.counterexample[0](0) == doctest::Approx(0.0));
  CHECK(std::fabs(dup.counterexample[0](1)) == doctest::Approx(1.0));
  CHECK((dup.counterexample[0] + dup.counterexample[1]).norm() == doctest::Approx(0.0));

  const AlliednessResult single = alliedness_certificate({halfspaces({{1, 1}}, {0})}, vec({0, 0}), 1.0);
  CHECK(single.allied);
  CHECK(single.a == doctest::Approx(1.0));
}

TEST_CASE("metric_inequality_audit examples") {
  const AuditReport axes = metric_inequality_audit({x_axis(), y_axis()}, vec({0, 0}), 1.0, 1.0, 0.05);
  CHECK(axes.passed());
  CHECK(axes.constants.at("worst_ratio") <= 1.0 + 1e-9);
  CHECK(axes.constants.at("worst_ratio") > 0.99);

  const AuditReport dup = metric_inequality_audit({x_axis(), x_axis()}, vec({0, 0}), 1.0, 1.0, 0.05);
  CHECK(dup.passed());
  CHECK(dup.constants.at("worst_ratio") == doctest::Approx(0.5));

  const Instance t = generate({"tangency-adversarial", {{"theta", 0.05}}, 0});
  std::vector<Polyhedron> sets{t.polyhedron("S1"), t.polyhedron("S2")};
  for (double tau : {1.0, 5.0, 10.0}) {
    const AuditReport r = metric_inequality_audit(sets, vec({0, 0}), 0.5, tau, 0.05);
    CHECK(r.verdict == Verdict::fail);
    CHECK(!r.witnesses.empty());
  }
  CHECK(metric_inequality_audit(sets, vec({0, 0}), 0.5, 21.0, 0.05).passed());
}

TEST_CASE("intersection_rule_audit examples") {
  CHECK(intersection_rule_audit({x_axis(), y_axis()}, vec({0, 0}), 1.0, 1e-9).passed());
  CHECK(intersection_rule_audit({halfspaces({{1, 2}}, {0})}, vec({0, 0}), 1.0, 1e-9).passed());
  const std::vector<Polyhedron> pair{halfspaces({{1, 0}}, {0}), halfspaces({{-1, 1}}, {0})};
  REQUIRE(alliedness_certificate(pair, vec({0, 0}), 1.0).allied);
  CHECK(intersection_rule_audit(pair, vec({0, 0}), 1.0, 1e-9).passed());
}

TEST_CASE("condition_C_value examples") {
  const PolyMap zero = PolyMap::affine(MatrixXd::Zero(1, 1), VectorXd::Zero(1));
  for (double delta : {0.1, 0.01}) {
    const ConditionCResult id = condition_C_value(scalar(1.0), zero, sum_map(), origin(), 1.0, delta);
    CHECK(id.c == doctest::Approx(1.0 - delta));
    CHECK(!id.degenerate);
    const ConditionCResult two = condition_C_value(scalar(2.0), zero, sum_map(), origin(), 1.0, delta);
    CHECK(two.c == doctest::Approx(2.0 - 2.0 * delta));
  }
  const PolyMap gzero = PolyMap::affine(MatrixXd::Zero(1, 2), VectorXd::Zero(1));
  const ConditionCResult deg = condition_C_value(scalar(1.0), zero, gzero, origin(), 1.0, 0.1);
  CHECK(deg.c == doctest::Approx(0.0));
  CHECK(deg.degenerate);
}

TEST_CASE("condition_C_limit extrapolates the linear dependence on delta") {
  const ConditionCLimit l = condition_C_limit(scalar(2.0), scalar(0.5), PolyMap::linear(MatrixXd{{1.0, -1.0}}), origin(),
                                              1.0, 1e-3);
  CHECK(l.limit == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("estim_coder_audit examples") {
  const VectorXd z = VectorXd::Zero(1);
  const AuditReport up = estim_coder_audit(scalar(2.0), z, z, 1.0, 2.0, EstimKind::aubin_upper);
  CHECK(up.passed());
  CHECK(up.value.value() == doctest::Approx(2.0));
  CHECK(estim_coder_audit(scalar(2.0), z, z, 1.0, 2.0, EstimKind::open_lower).passed());
  const AuditReport low = estim_coder_audit(scalar(2.0), z, z, 1.0, 2.5, EstimKind::open_lower);
  CHECK(low.verdict == Verdict::fail);
  REQUIRE(!low.witnesses.empty());
  REQUIRE(low.witnesses.front().values.size() == 2);
  CHECK(std::fabs(low.witnesses.front().values[0]) == doctest::Approx(1.0));
  CHECK(low.witnesses.front().values[1] == doctest::Approx(2.0 * low.witnesses.front().values[0]));
}

TEST_CASE("condition_C_openness_audit examples") {
  const PolyMap zero = PolyMap::affine(MatrixXd::Zero(1, 1), VectorXd::Zero(1));
  const AuditReport pass = condition_C_openness_audit(scalar(1.0), zero, sum_map(), origin(), 0.9, 1.0, 0.05);
  CHECK(pass.passed());
  CHECK(pass.constants.at("measured_rate") == doctest::Approx(1.0));
  const AuditReport fail = condition_C_openness_audit(scalar(1.0), zero, sum_map(), origin(), 1.2, 1.0, 0.05);
  CHECK(fail.verdict == Verdict::fail);
  CHECK(!fail.witnesses.empty());
  CHECK(condition_C_openness_audit(scalar(1.0), zero, sum_map(), origin(), 0.01, 1.0, 0.05).passed());
}

TEST_CASE("slice_polymap fixes one argument") {
  const PolyMap s = slice_polymap(sum_map(), 1, true, vec({2}));
  CHECK(s.n == 1);
  CHECK(s.graph.contains(vec({1, 3})));
  CHECK(!s.graph.contains(vec({1, 2})));
}

TEST_CASE("faces_near enumerates the faces of a square corner") {
  const Polyhedron q = halfspaces({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, {1, 1, 1, 1});
  CHECK(faces_near(q, vec({1, 1}), 0.5).size() == 4);  // corner, two edges, interior
  CHECK(faces_near(q, vec({0, 0}), 0.5).size() == 1);
  CHECK(faces_near(q, vec({0, 0}), 10.0).size() == 9);
}

TEST_CASE("property: normal generators are polar to feasible directions") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    MatrixXd A(4, 2);
    for (int i = 0; i < 4; ++i) A.row(i) << std::round(4 * u(rng)) / 4, std::round(4 * u(rng)) / 4;
    const Polyhedron s(A, VectorXd::Zero(4));
    const Cone n = frechet_normal_cone(s, VectorXd::Zero(2));
    for (int k = 0; k < 20; ++k) {
      const VectorXd y = s.project(VectorXd(vec({u(rng), u(rng)})));
      for (Eigen::Index g = 0; g < n.generators.cols(); ++g) CHECK(n.generators.col(g).dot(y) <= 1e-9);
    }
  }
}

TEST_CASE("property: coderivatives of linear maps are adjoint images") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = generate({"polyhedral-linear", Json::object(), seed});
    const PolyMap& f = inst.polymap("F");
    const MatrixXd A = matrix_from_json(inst.meta["A"]);
    std::mt19937_64 rng(seed);
    for (int k = 0; k < 3; ++k) {
      VectorXd ys(f.m);
      for (int i = 0; i < f.m; ++i) ys(i) = double(int(rng() % 9) - 4) / 2.0;
      const CoderivativeSet d = coderivative(f, VectorXd::Zero(f.n), VectorXd::Zero(f.m), ys);
      const VectorXd want = A.transpose() * ys;
      CHECK(d.contains(want));
      const auto [lo, hi] = d.bounds();
      CHECK((lo - want).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((hi - want).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(!d.contains(want + VectorXd::Constant(f.n, 0.5)));
    }
  }
}

TEST_CASE("property: allied pairs satisfy the metric inequality with tau = a") {
  std::mt19937_64 rng(4);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto row = [&] {
      const double t = double(rng() % 16) * M_PI / 8.0;
      return vec({std::cos(t), std::sin(t)});
    };
    MatrixXd A1(1, 2), A2(1, 2);
    A1.row(0) = row().transpose();
    A2.row(0) = row().transpose();
    const std::vector<Polyhedron> sets{Polyhedron(A1, VectorXd::Zero(1)), Polyhedron(A2, VectorXd::Zero(1))};
    const AlliednessResult a = alliedness_certificate(sets, vec({0, 0}), 1.0);
    if (!a.allied) continue;
    ++checked;
    CHECK(metric_inequality_audit(sets, vec({0, 0}), 0.25, a.a, 0.025).passed());
    CHECK(intersection_rule_audit(sets, vec({0, 0}), 0.25, 1e-9).passed());
  }
  CHECK(checked > 5);
}

TEST_CASE("property: condition C matches 1/(LC) - MD on the linear suite") {
  for (double alpha : {2.0, -3.0})
    for (double beta : {0.5, -1.0})
      for (double kappa : {0.25, -0.5}) {
        if (alpha * kappa * beta >= 0 || std::fabs(beta * kappa) >= std::fabs(alpha)) continue;
        const Instance inst = generate(
            {"polyhedral-linear", {{"composition", true}, {"alpha", alpha}, {"beta", beta}, {"kappa", kappa}}, 0});
        const double want = inst.meta["oracle"]["c_limit"];
        const ConditionCLimit l =
            condition_C_limit(inst.polymap("F1"), inst.polymap("F2"), inst.polymap("G"), origin(), 1.0, 1e-4);
        CHECK(std::fabs(l.limit - want) <= 1e-6);
      }
}
