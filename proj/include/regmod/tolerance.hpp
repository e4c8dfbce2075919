#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace regmod {

struct Tolerance {
  double abs = 1e-9;  // distances and metric axioms
  double rel = 1e-9;  // modulus comparisons
};

// Process-wide defaults. Operations take a Tolerance argument where it matters;
// these are the values used when none is given.
Tolerance& default_tolerance();

// a <= b up to the tolerance (handles +inf on either side).
inline bool approx_leq(double a, double b, const Tolerance& t = default_tolerance()) {
  if (a <= b) return true;
  if (std::isinf(a) || std::isinf(b)) return false;
  return a - b <= t.abs + t.rel * std::max(std::fabs(a), std::fabs(b));
}

inline bool approx_eq(double a, double b, const Tolerance& t = default_tolerance()) {
  return approx_leq(a, b, t) && approx_leq(b, a, t);
}

// Enumeration budget: maximum number of points in a materialized product or sampled grid.
// Initialised from REGMOD_BUDGET when set.
std::size_t enumeration_budget();
void set_enumeration_budget(std::size_t n);

}  // namespace regmod
