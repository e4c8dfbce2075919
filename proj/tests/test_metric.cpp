#include <doctest.h>

#include <cmath>
#include <random>

#include "regmod/errors.hpp"
#include "support.hpp"

using namespace regmod;
using regmod::testing::integers;

namespace {

SpaceRef line8() { return line_space({0, 1, 2, 3, 4, 5, 6, 7}); }

std::vector<SpaceRef> random_spaces(int count, std::size_t n) {
  std::vector<SpaceRef> out;
  for (int s = 0; s < count; ++s)
    out.push_back(generate({"random-metric", {{"n", n}}, std::uint64_t(s)}).space("X"));
  return out;
}

}  // namespace

TEST_CASE("dist_point_set examples") {
  const SpaceRef L = line8();
  CHECK(dist_point_set(0, PointSet(L, {0, 5})) == ExtReal(0.0));
  CHECK(dist_point_set(1, PointSet::empty(L)).is_infinite());
  CHECK(dist_point_set(1, PointSet(L, {3, 7})) == ExtReal(2.0));
}

TEST_CASE("excess examples") {
  const SpaceRef L = integers(3);
  CHECK(excess(PointSet(L, {0, 1}), PointSet(L, {0})) == ExtReal(1.0));
  CHECK(excess(PointSet(L, {0, 2}), PointSet(L, {0, 2})) == ExtReal(0.0));
  CHECK(excess(PointSet(L, {2}), PointSet::empty(L)).is_infinite());
  CHECK(excess(PointSet::empty(L), PointSet(L, {1})) == ExtReal(0.0));
}

TEST_CASE("ball examples") {
  const SpaceRef L = integers(3);
  CHECK(ball(L, 0, 1.5, false) == PointSet(L, {0, 1}));
  CHECK(ball(L, 0, 1.0, true) == PointSet(L, {0, 1}));
  CHECK(ball(L, 0, 1.0, false) == PointSet(L, {0}));
  CHECK(ball(L, 2, 0.25, false) == PointSet(L, {2}));
}

TEST_CASE("product_space examples") {
  const SpaceRef one = integers(1);
  const SpaceRef p1 = product_space(ProductMetric::additive({one, one}));
  CHECK(p1->size() == 1);
  CHECK(p1->d(0, 0) == 0.0);

  const SpaceRef two = integers(2);
  const SpaceRef sq = product_space(ProductMetric::additive({two, two}));
  REQUIRE(sq->size() == 4);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) {
      const double d = sq->d(i, j);
      CHECK((d == 0.0 || d == 1.0 || d == 2.0));
    }
  CHECK(sq->d(0, 3) == 2.0);

  // Weighted max with the singleton third factor: max{d_X, 2 d_Y1}.
  const SpaceRef X = integers(3), Y1 = line_space({0, 0.5, 3}), Y2 = integers(1);
  const ProductMetric pm = ProductMetric::weighted_max({X, Y1, Y2}, {1.0, 2.0, 1.0 / 3.0});
  const SpaceRef P = product_space(pm);
  for (Index a = 0; a < P->size(); ++a)
    for (Index b = 0; b < P->size(); ++b) {
      const auto ca = pm.decode(a), cb = pm.decode(b);
      CHECK(P->d(a, b) == doctest::Approx(std::max(X->d(ca[0], cb[0]), 2.0 * Y1->d(ca[1], cb[1]))));
    }
}

TEST_CASE("product_space respects the budget") {
  set_enumeration_budget(8);
  CHECK_THROWS_AS(product_space(ProductMetric::additive({integers(3), integers(3)})), BudgetExceeded);
  set_enumeration_budget(2048);
}

TEST_CASE("validate_metric examples") {
  const MetricSpace indisc({"a", "b"}, {0, 0, 0, 0});
  const AuditReport r1 = validate_metric(indisc);
  CHECK(r1.verdict == Verdict::fail);
  REQUIRE(!r1.witnesses.empty());
  CHECK(r1.witnesses.front().role == "indiscernible-pair");
  CHECK(r1.witnesses.front().values == std::vector<double>{0, 1});

  const SpaceRef e = euclidean_space({{0, 0}, {3, 4}, {1, 1}, {-2, 5}});
  CHECK(validate_metric(*e).passed());

  const MetricSpace tri({"0", "1", "2"}, {0, 1, 5, 1, 0, 1, 5, 1, 0});
  const AuditReport r3 = validate_metric(tri);
  CHECK(r3.verdict == Verdict::fail);
  REQUIRE(!r3.witnesses.empty());
  CHECK(r3.witnesses.front().role == "triangle");
  CHECK(r3.witnesses.front().values == std::vector<double>{0, 1, 2});
}

TEST_CASE("make_space refuses non-metrics and malformed input") {
  CHECK_THROWS_AS(make_space({"a", "b"}, {{0, 1}, {2, 0}}), InputError);
  CHECK_THROWS_AS(make_space({"a", "b"}, {{0, 1}}), InputError);
  CHECK_THROWS_AS(make_space({"a", "b"}, {{0, -1}, {-1, 0}}), InputError);
  CHECK_THROWS_AS(make_space({"a", "b"}, {{0, INFINITY}, {INFINITY, 0}}), InputError);
}

TEST_CASE("isolation, eccentricity and realized distances on a line") {
  const SpaceRef L = line_space({0, 1, 3});
  CHECK(L->isolation_radius(2) == 2.0);
  CHECK(L->eccentricity(1) == 2.0);
  CHECK(L->diameter() == 3.0);
  CHECK(L->realized_distances() == std::vector<double>{1, 2, 3});
  CHECK(std::isinf(integers(1)->isolation_radius(0)));
}

TEST_CASE("property: distance vanishes exactly on the set") {
  std::mt19937_64 rng(11);
  for (const SpaceRef& X : random_spaces(30, 7)) {
    std::vector<Index> members;
    for (Index i = 0; i < X->size(); ++i)
      if (rng() % 2) members.push_back(i);
    if (members.empty()) members.push_back(0);
    const PointSet A(X, members);
    for (Index x = 0; x < X->size(); ++x) CHECK((dist_point_set(x, A) == ExtReal(0.0)) == A.contains(x));
  }
}

TEST_CASE("property: excess is zero iff inclusion, and satisfies the triangle inequality") {
  std::mt19937_64 rng(5);
  for (const SpaceRef& X : random_spaces(30, 6)) {
    auto pick = [&] {
      std::vector<Index> m;
      for (Index i = 0; i < X->size(); ++i)
        if (rng() % 3 == 0) m.push_back(i);
      if (m.empty()) m.push_back(rng() % X->size());
      return PointSet(X, m);
    };
    const PointSet A = pick(), B = pick(), C = pick();
    bool subset = true;
    for (Index a : A.members()) subset &= B.contains(a);
    CHECK((excess(A, B) == ExtReal(0.0)) == subset);
    CHECK(excess(A, C).value() <= excess(A, B).value() + excess(B, C).value() + 1e-12);
  }
}

TEST_CASE("property: sum and max products have nested balls up to the factor count") {
  const auto spaces = random_spaces(6, 4);
  for (std::size_t s = 0; s + 1 < spaces.size(); ++s) {
    const std::vector<SpaceRef> f{spaces[s], spaces[s + 1]};
    const SpaceRef sum = product_space(ProductMetric::additive(f));
    const SpaceRef mx = product_space(ProductMetric::weighted_max(f, {1.0, 1.0}));
    for (Index x = 0; x < sum->size(); ++x)
      for (double r : {0.25, 0.5, 1.0, 2.0}) {
        // d_max <= d_sum <= 2 d_max
        for (Index y : ball_indices(*sum, x, r)) CHECK(mx->d(x, y) < r);
        for (Index y : ball_indices(*mx, x, r / 2.0)) CHECK(sum->d(x, y) < r);
      }
  }
}
