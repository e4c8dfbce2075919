#include <doctest.h>

#include <cmath>

#include "regmod/errors.hpp"
#include "regmod/moduli.hpp"
#include "support.hpp"

using namespace regmod;
using namespace regmod::testing;

namespace {

ScaleWindow full(double r_dom, double r_cod, double eps) { return {r_dom, r_cod, eps, std::nullopt}; }

SetMap constant_map(const SpaceRef& X, const SpaceRef& Y, Index c) {
  return SetMap::from_rule(X, Y, [c](Index) { return std::vector<Index>{c}; });
}

}  // namespace

TEST_CASE("reg_at_scale examples") {
  const SpaceRef X = integers(5);
  const ModulusReport id = reg_at_scale(SetMap::identity(X), {2, 2}, full(3, 3, 3));
  CHECK(id.value == ExtReal(1.0));
  CHECK(!id.witnesses.empty());
  CHECK(reg_at_scale(doubling(), {0, 0}, full(5, 9, 5)).value == ExtReal(0.5));
  const ModulusReport tiny = reg_at_scale(doubling(), {2, 2}, full(0.5, 0.5, 0.5));
  CHECK(tiny.value == ExtReal(0.0));
  CHECK(tiny.vacuous);
}

TEST_CASE("lip_at_scale examples") {
  const SpaceRef X = integers(5), Y = integers(3);
  CHECK(lip_at_scale(constant_map(X, Y, 1), {0, 1}, full(5, 5, 5)).value == ExtReal(0.0));
  CHECK(lip_at_scale(doubling(), {2, 2}, full(5, 9, 5)).value == ExtReal(2.0));
  const SetMap holes(X, Y, {{0, 0}, {1, 1}, {3, 1}});  // F(2) is empty
  CHECK(lip_at_scale(holes, {1, 1}, full(5, 5, 5)).value.is_infinite());
}

TEST_CASE("lop_at_scale examples") {
  const SpaceRef X = integers(5);
  CHECK(lop_at_scale(SetMap::identity(X), {2, 2}, full(5, 5, 5)).value == ExtReal(1.0));
  CHECK(lop_at_scale(doubling(), {0, 0}, full(5, 9, 5)).value == ExtReal(2.0));
  // A constant map into a non-singleton codomain: at scale eps the rate is d(c, y')/eps,
  // which tends to 0 as eps grows.
  const SetMap c = constant_map(X, integers(3), 0);
  for (double eps : {1.0, 2.0, 4.0}) CHECK(lop_at_scale(c, {0, 0}, full(5, 5, eps)).value.value() == doctest::Approx(1.0 / eps));
}

TEST_CASE("openness radii cover realized distances, midpoints and eps") {
  const auto radii = openness_radii(*line_space({0, 1, 3}), 2.5);
  for (double r : {1.0, 2.0, 1.5, 2.5}) CHECK(std::find(radii.begin(), radii.end(), r) != radii.end());
  for (double r : radii) CHECK(r <= 2.5);
}

TEST_CASE("partial_moduli examples") {
  SumInstance s;
  const std::array<Index, 3> base{2, 1, 3};
  const ScaleWindow w = full(1.5, 1.5, 1.5);
  CHECK(partial_moduli(s.g, base, w, PartialKind::reg_in_first).value == ExtReal(1.0));
  CHECK(partial_moduli(s.g, base, w, PartialKind::lip_in_second).value == ExtReal(1.0));
  const BiParamSetMap first = BiParamSetMap::from_rule(s.Y1, s.Y2, s.Y1, [](Index a, Index) { return std::vector<Index>{a}; });
  CHECK(partial_moduli(first, {2, 1, 2}, w, PartialKind::lip_in_second).value == ExtReal(0.0));
}

TEST_CASE("link_audit examples") {
  const SpaceRef X = integers(5);
  const AuditReport id = link_audit(SetMap::identity(X), {0, 0}, full(5, 5, 5));
  CHECK(id.passed());
  CHECK(id.constants.at("reg") == 1.0);
  CHECK(id.constants.at("lop") == 1.0);
  CHECK(id.constants.at("lip_inverse") == 1.0);

  const AuditReport d = link_audit(doubling(), {0, 0}, full(5, 9, 5));
  CHECK(d.passed());
  CHECK(d.constants.at("lop") == 2.0);
  CHECK(d.constants.at("reg") == 0.5);
  CHECK(d.constants.at("lip_inverse") == 0.5);

  CHECK(link_audit(doubling(), {2, 2}, full(5, 0.5, 5)).verdict == Verdict::scale_mismatch);
}

TEST_CASE("lsc_envelope examples") {
  const SpaceRef X = integers(3), Y = integers(3);
  const SetMap f(X, Y, {{0, 0}, {2, 2}});
  CHECK(lsc_envelope(f, 0, 0, 0.5) == ExtReal(0.0));
  CHECK(lsc_envelope(f, 0, 2, 0.5) == ExtReal(2.0));  // below the isolation radius
  CHECK(lsc_envelope(f, 1, 2, 1.0) == ExtReal(0.0));  // F(1) empty, neighbour 2 realizes it
  CHECK(lsc_envelope(f, 1, 2, 0.5).is_infinite());
}

TEST_CASE("phi_R examples") {
  SumInstance s;
  CHECK(phi_R(s.f1, s.f2, s.g, {1, 3, 1}, 3, 0.5).is_infinite());
  CHECK(phi_R(s.f1, s.f2, s.g, {1, 2, 1}, 3, 0.5) == ExtReal(0.0));
  CHECK(phi_R(s.f1, s.f2, s.g, {1, 2, 1}, 4, 0.5) == ExtReal(1.0));
}

TEST_CASE("envelope_zeroset_audit examples") {
  CHECK(envelope_zeroset_audit(SetMap::identity(integers(4)), 1).passed());
  const SetMap f(integers(3), integers(3), {{0, 0}});
  const AuditReport empty = envelope_zeroset_audit(f, 2);
  CHECK(empty.passed());
  CHECK(empty.constants.at("zero_set_size") == 0.0);
  const AuditReport d = envelope_zeroset_audit(doubling(), 1);
  CHECK(d.passed());
  CHECK(d.constants.at("zero_set_size") == 1.0);
}

TEST_CASE("rho0 examples") {
  CHECK(rho0({1, 1, 0.5, 1}) == doctest::Approx(1.0));
  CHECK(rho0({1, 1, 1e-12, 1}) < 1e-11);
  CHECK_THROWS_AS(rho0({1, 1, 1, 1}), HypothesisViolation);
  CHECK_THROWS_AS(rho0({0, 1, 1, 0}), HypothesisViolation);
  CHECK(rho0({2, 0, 1, 5}) == 2.0);
}

TEST_CASE("property: shrinking windows never raises reg/lip nor lowers lop") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Instance inst = generate({"random-relation", {{"n_dom", 5}, {"n_cod", 5}, {"density", 0.5}}, seed});
    const SetMap& f = inst.map("F");
    const std::pair<Index, Index> b{inst.meta["base"][0].get<Index>(), inst.meta["base"][1].get<Index>()};
    double prev_reg = INFINITY, prev_lip = INFINITY, prev_lop = 0.0;
    for (double r : {4.0, 2.0, 1.0, 0.5}) {
      const ScaleWindow w = full(r, r, r);
      const double reg = reg_at_scale(f, b, w).value.value();
      const double lip = lip_at_scale(f, b, w).value.value();
      const double lop = lop_at_scale(f, b, w).value.value();
      CHECK(reg <= prev_reg);
      CHECK(lip <= prev_lip);
      CHECK(lop >= prev_lop);
      prev_reg = reg;
      prev_lip = lip;
      prev_lop = lop;
    }
  }
}

TEST_CASE("property: grid-linear oracles at saturated windows") {
  for (int a = 1; a <= 4; ++a) {
    const Instance inst = generate({"grid-linear", {{"a", a}, {"n", 6}}, 0});
    const ScaleWindow w = full(6, 6.0 * a, 6);
    CHECK(lip_at_scale(inst.map("F"), {0, 0}, w).value.value() == doctest::Approx(inst.meta["oracle"]["lip"].get<double>()));
    CHECK(reg_at_scale(inst.map("F"), {0, 0}, w).value.value() == doctest::Approx(inst.meta["oracle"]["reg"].get<double>()));
    CHECK(lop_at_scale(inst.map("F"), {0, 0}, w).value.value() == doctest::Approx(inst.meta["oracle"]["lop"].get<double>()));
  }
  for (int q = 2; q <= 4; ++q) {
    const Instance inst = generate({"grid-linear", {{"q", q}, {"n", 12}}, 0});
    const ScaleWindow w = full(12, 12, 12);
    CHECK(lip_at_scale(inst.map("F"), {0, 0}, w).value.value() == doctest::Approx(1.0));
    CHECK(reg_at_scale(inst.map("F"), {0, 0}, w).value.value() == doctest::Approx(double(q)));
    CHECK(lop_at_scale(inst.map("F"), {0, 0}, w).value.value() == doctest::Approx(1.0 / q));
  }
}

TEST_CASE("property: envelope is nonincreasing in delta and phi_R matches the envelope of R") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance inst = generate({"random-relation", {{"n_dom", 4}, {"n_cod", 3}, {"density", 0.5}}, seed});
    const SetMap& f = inst.map("F");
    for (Index x = 0; x < 4; ++x)
      for (Index y = 0; y < 3; ++y) {
        double prev = INFINITY;
        for (double d : {0.1, 0.5, 1.0, 2.0, 8.0}) {
          const double v = lsc_envelope(f, x, y, d).value();
          CHECK(v <= prev);
          prev = v;
        }
        const double iso = f.dom()->isolation_radius(x);
        CHECK(lsc_envelope(f, x, y, iso / 2).value() == f.dist_to_image(x, y).value());
      }

    const BiParamSetMap g = BiParamSetMap::from_rule(f.cod(), f.cod(), f.dom(), [&](Index u, Index v) {
      return to_vec(inverse(f).fiber((u + v) % 3));
    });
    const ProductMetric pm = r_domain_metric(f, f);
    const SetMap R = build_R(f, f, g);
    for (const auto& [x, a] : f.graph())
      for (Index b : f.fiber(x))
        for (Index z = 0; z < 4; ++z)
          for (double d : {0.3, 1.0, 3.0}) {
            const Index c[3] = {x, a, b};
            // Equality on graph-feasible tuples; off the graph phi_R is +inf by definition.
            CHECK(phi_R(f, f, g, {x, a, b}, z, d) == lsc_envelope(R, pm.encode(c), z, d));
          }
  }
}
