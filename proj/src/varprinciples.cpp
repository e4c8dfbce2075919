#include "regmod/varprinciples.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regmod/errors.hpp"
#include "regmod/tolerance.hpp"

namespace regmod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double positive_part(double v) { return std::max(v, 0.0); }

// Product for the error bound: 0 * inf = 0 and negative * inf = -inf.
double times_extended(double m, double d) {
  if (m == 0.0 || d == 0.0) return 0.0;
  return m * d;
}

}  // namespace

ScalarField::ScalarField(SpaceRef space, std::vector<double> values) : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw InputError("ScalarField: null space");
  if (values_.size() != space_->size()) throw InputError("ScalarField: one value per point required");
  bool finite_somewhere = false;
  for (double v : values_) {
    if (std::isnan(v) || v == -kInf) throw InputError("ScalarField: values must be real or +inf");
    finite_somewhere |= std::isfinite(v);
  }
  if (!finite_somewhere) throw InputError("ScalarField: identically +inf");
}

double ScalarField::infimum() const { return *std::min_element(values_.begin(), values_.end()); }

ScalarField ScalarField::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw PreconditionError("ScalarField::scaled: factor must be positive");
  std::vector<double> v = values_;
  for (double& x : v) x *= c;
  return ScalarField(space_, std::move(v));
}

ScalarField distance_field(const PointSet& a) {
  const MetricSpace& m = *a.space();
  std::vector<double> v(m.size());
  for (Index i = 0; i < m.size(); ++i) v[i] = dist_to(m, i, a.members()).value();
  return ScalarField(a.space(), std::move(v));
}

PointSet sublevel_set(const ScalarField& f) {
  std::vector<Index> s;
  for (Index i = 0; i < f.values().size(); ++i)
    if (f(i) <= 0.0) s.push_back(i);
  return PointSet(f.space(), std::move(s));
}

SlopeResult slope_quantity(const ScalarField& f, Index xbar, SlopeReading reading) {
  const MetricSpace& X = *f.space();
  if (xbar >= X.size()) throw InputError("slope_quantity: point out of range");
  if (!(f(xbar) > 0.0)) throw PreconditionError("slope_quantity: f(xbar) must be positive");
  const PointSet S = sublevel_set(f);
  const double dS = dist_to(X, xbar, S.members()).value();
  SlopeResult res;
  res.m = kInf;
  for (Index x = 0; x < X.size(); ++x) {
    if (!(X.d(x, xbar) < dS) || !(f(x) <= f(xbar))) continue;
    ++res.candidates;
    double sup = -kInf;
    bool any = false;
    for (Index u = 0; u < X.size(); ++u) {
      if (u == x) continue;  // both readings: the 0/0 term is never formed
      if (reading == SlopeReading::competitor_not_xbar && u == xbar) continue;
      const double fu = positive_part(f(u));
      if (std::isinf(fu)) {
        // f(x) finite here, so the quotient is -inf.
        any = true;
        continue;
      }
      any = true;
      sup = std::max(sup, (f(x) - fu) / X.d(x, u));
    }
    if (!any) {
      ++res.ill_posed;
      continue;
    }
    if (sup < res.m) {
      res.m = sup;
      res.argmin = x;
    }
  }
  return res;
}

AuditReport error_bound_audit(const ScalarField& f, Index xbar) {
  const MetricSpace& X = *f.space();
  const SlopeResult a = slope_quantity(f, xbar, SlopeReading::competitor_not_x);
  const SlopeResult b = slope_quantity(f, xbar, SlopeReading::competitor_not_xbar);
  const double dS = dist_to(X, xbar, sublevel_set(f).members()).value();
  AuditReport rep;
  rep.kind = "error_bound_audit";
  const double lhs = times_extended(a.m, dS);
  const double lhs_literal = times_extended(b.m, dS);
  rep.value = lhs;
  rep.constants["m"] = a.m;
  rep.constants["m_literal"] = b.m;
  rep.constants["dist_to_S"] = dS;
  rep.constants["f_xbar"] = f(xbar);
  rep.constants["lhs"] = lhs;
  rep.constants["lhs_literal"] = lhs_literal;
  rep.constants["candidates"] = double(a.candidates);
  if (a.ill_posed) rep.notes.push_back(std::to_string(a.ill_posed) + " candidate(s) without competitors left out");
  if (a.m != b.m) rep.notes.push_back("readings differ");
  if (!approx_leq(lhs, f(xbar))) rep.fail_with("xbar,argmin", {double(xbar), double(a.argmin)});
  if (!approx_leq(lhs_literal, f(xbar))) rep.fail_with("xbar,argmin_literal", {double(xbar), double(b.argmin)});
  return rep;
}

EvpCertificate ekeland(const ScalarField& f, Index x0, double s, double rate) {
  const MetricSpace& X = *f.space();
  if (x0 >= X.size()) throw InputError("ekeland: point out of range");
  if (!(s > 0.0) || !(rate > 0.0)) throw PreconditionError("ekeland: s and rate must be positive");
  if (!(f(x0) < f.infimum() + s)) throw PreconditionError("ekeland: f(x0) must be below inf f + s");
  EvpCertificate c;
  c.start = x0;
  c.s = s;
  c.rate = rate;
  Index u = x0;
  const std::size_t cap = X.size() * X.size() + 1;
  for (bool moved = true; moved;) {
    moved = false;
    for (Index x = 0; x < X.size(); ++x) {
      if (f(x) + rate * X.d(u, x) < f(u)) {
        u = x;
        moved = true;
        ++c.iterations;
        break;
      }
    }
    if (c.iterations > cap) throw SolverError("ekeland: descent did not terminate");
  }
  c.result = u;
  c.decrease_ok = approx_leq(f(u), f(x0));
  c.distance_ok = approx_leq(X.d(x0, u), s / rate);
  c.stationarity_ok = true;
  for (Index x = 0; x < X.size(); ++x)
    if (!approx_leq(f(u), f(x) + rate * X.d(u, x))) c.stationarity_ok = false;
  return c;
}

}  // namespace regmod
