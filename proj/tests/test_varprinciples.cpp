#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "regmod/errors.hpp"
#include "regmod/varprinciples.hpp"
#include "support.hpp"

using namespace regmod;

namespace {

constexpr double kInf = INFINITY;

ScalarField three_point() { return ScalarField(grid_line(3), {0, 2, 3}); }

}  // namespace

TEST_CASE("sublevel_set examples") {
  const SpaceRef L = grid_line(3);
  CHECK(sublevel_set(ScalarField(L, {1, 1, 1})).is_empty());
  const PointSet A(L, {0, 2});
  CHECK(sublevel_set(distance_field(A)) == A);
  const ScalarField f = three_point();
  CHECK(sublevel_set(f) == PointSet(f.space(), {0}));
}

TEST_CASE("slope_quantity examples") {
  const SlopeResult r = slope_quantity(three_point(), 2);
  CHECK(r.candidates == 2);
  CHECK(r.m == doctest::Approx(1.5));
  CHECK(r.argmin == 2);

  const SpaceRef L = grid_line(6);
  const ScalarField d = distance_field(PointSet(L, {0}));
  for (Index x = 1; x < 6; ++x) CHECK(slope_quantity(d, x).m == doctest::Approx(1.0));

  // d(xbar, S) below the spacing: xbar is the only candidate, and still a candidate.
  const SpaceRef tight = line_space({0, 0.25, 3});
  const ScalarField g(tight, {0, 1, 2});
  const SlopeResult only = slope_quantity(g, 1);
  CHECK(only.candidates == 1);
  CHECK(only.m == doctest::Approx(4.0));
  CHECK(error_bound_audit(g, 1).passed());

  CHECK_THROWS_AS(slope_quantity(three_point(), 0), PreconditionError);
}

TEST_CASE("the literal competitor reading never exceeds the default") {
  const SlopeResult a = slope_quantity(three_point(), 2, SlopeReading::competitor_not_x);
  const SlopeResult b = slope_quantity(three_point(), 2, SlopeReading::competitor_not_xbar);
  CHECK(b.m <= a.m);
  // x = 1 keeps only u = 0: quotient 2; x = 2 drops nothing. m = min(2, 1.5).
  CHECK(b.m == doctest::Approx(1.5));
}

TEST_CASE("error_bound_audit examples") {
  const AuditReport r = error_bound_audit(three_point(), 2);
  CHECK(r.passed());
  CHECK(r.constants.at("lhs") == doctest::Approx(3.0));
  CHECK(r.constants.at("f_xbar") == 3.0);

  const SpaceRef L = grid_line(6);
  const ScalarField d = distance_field(PointSet(L, {0}));
  const AuditReport e = error_bound_audit(d, 4);
  CHECK(e.passed());
  CHECK(e.constants.at("lhs") == doctest::Approx(4.0));

  const AuditReport s = error_bound_audit(three_point().scaled(10.0), 2);
  CHECK(s.passed());
  CHECK(s.constants.at("lhs") == doctest::Approx(30.0));
  CHECK(s.constants.at("m") == doctest::Approx(15.0));
}

TEST_CASE("infinite values are handled") {
  const SpaceRef L = grid_line(4);
  const ScalarField f(L, {0, kInf, 2, 1});
  CHECK(error_bound_audit(f, 2).passed());
  CHECK_THROWS_AS(ScalarField(L, {kInf, kInf, kInf, kInf}), InputError);
  CHECK_THROWS_AS(ScalarField(L, {0, 1}), InputError);
}

TEST_CASE("ekeland examples") {
  const EvpCertificate at_min = ekeland(three_point(), 0, 1.0, 1.0);
  CHECK(at_min.result == 0);
  CHECK(at_min.valid());

  const EvpCertificate c = ekeland(three_point(), 2, 3.5, 1.0);
  CHECK(c.result == 0);
  CHECK(c.decrease_ok);
  CHECK(c.distance_ok);
  CHECK(c.stationarity_ok);

  // A steep penalty pins the start point.
  const EvpCertificate stuck = ekeland(three_point(), 2, 3.5, 1000.0);
  CHECK(stuck.result == 2);
  CHECK(stuck.valid());

  CHECK_THROWS_AS(ekeland(three_point(), 2, 2.0, 1.0), PreconditionError);
}

TEST_CASE("property: error bound holds on random fields, and scales with f") {
  std::mt19937_64 rng(3);
  int audited = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Instance inst = generate({"random-metric", {{"n", 4 + seed % 5}}, seed});
    const ScalarField& f = inst.field("f");
    for (Index x = 0; x < f.values().size(); ++x) {
      if (!(f(x) > 0.0) || std::isinf(f(x))) continue;
      const AuditReport r = error_bound_audit(f, x);
      CHECK(r.passed());
      const AuditReport s = error_bound_audit(f.scaled(4.0), x);
      CHECK(s.constants.at("m") == doctest::Approx(4.0 * r.constants.at("m")));
      ++audited;
    }
  }
  CHECK(audited > 100);
}

TEST_CASE("property: Ekeland certificates verify and terminate in bounded steps") {
  std::mt19937_64 rng(9);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = generate({"random-metric", {{"n", 6}}, seed});
    const ScalarField& f = inst.field("f");
    const double inf = f.infimum();
    for (Index x0 = 0; x0 < 6; ++x0) {
      if (std::isinf(f(x0))) continue;
      const double s = f(x0) - inf + 0.25;
      const double rate = double(1 + rng() % 8) / 4.0;
      const EvpCertificate c = ekeland(f, x0, s, rate);
      CHECK(c.valid());
      std::set<double> range(f.values().begin(), f.values().end());
      CHECK(c.iterations <= f.values().size() * range.size());
    }
  }
}
