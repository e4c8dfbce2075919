#pragma once

#include <cstddef>
#include <vector>

#include "regmod/metric.hpp"
#include "regmod/report.hpp"

namespace regmod {

// f : X -> R u {+inf} on a finite space. Every such f is lower semicontinuous.
class ScalarField {
 public:
  // Throws InputError on a size mismatch, NaN, -inf, or f identically +inf.
  ScalarField(SpaceRef space, std::vector<double> values);

  [[nodiscard]] const SpaceRef& space() const { return space_; }
  [[nodiscard]] double operator()(Index i) const { return values_.at(i); }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] double infimum() const;
  [[nodiscard]] ScalarField scaled(double c) const;

 private:
  SpaceRef space_;
  std::vector<double> values_;
};

// f(x) = d(x, A).
ScalarField distance_field(const PointSet& a);

// {x : f(x) <= 0}.
PointSet sublevel_set(const ScalarField& f);

enum class SlopeReading {
  competitor_not_x,     // u ranges over u != x (0/0 quotient excluded)
  competitor_not_xbar,  // u ranges over u != xbar; the u = x term is skipped
};

struct SlopeResult {
  double m = 0.0;                    // may be +inf (no candidates) or negative
  std::size_t candidates = 0;
  std::size_t ill_posed = 0;         // candidates with no competitor, left out of the inf
  Index argmin = 0;                  // candidate attaining m when finite
};

// inf over x with d(x,xbar) < d(xbar,S), f(x) <= f(xbar) of
// sup over competitors u of (f(x) - [f(u)]_+) / d(x,u). Requires f(xbar) > 0.
SlopeResult slope_quantity(const ScalarField& f, Index xbar,
                           SlopeReading reading = SlopeReading::competitor_not_x);

// Checks m(xbar) * d(xbar, S) <= f(xbar) under both readings.
AuditReport error_bound_audit(const ScalarField& f, Index xbar);

struct EvpCertificate {
  Index start = 0;
  Index result = 0;
  double s = 0.0;
  double rate = 0.0;
  bool decrease_ok = false;     // f(u) <= f(x0)
  bool distance_ok = false;     // d(x0,u) <= s / rate
  bool stationarity_ok = false; // f(u) <= f(x') + rate d(u,x') for all x'
  std::size_t iterations = 0;

  [[nodiscard]] bool valid() const { return decrease_ok && distance_ok && stationarity_ok; }
};

// Exact descent: from x0, repeatedly move to the first (index order) x' with
// f(x') + rate d(u,x') < f(u). Requires f(x0) < inf f + s, s > 0, rate > 0.
EvpCertificate ekeland(const ScalarField& f, Index x0, double s, double rate);

}  // namespace regmod
