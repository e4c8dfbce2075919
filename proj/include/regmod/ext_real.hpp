#pragma once

#include <compare>
#include <iosfwd>
#include <limits>
#include <string>

namespace regmod {

// Nonnegative extended real: a finite value in [0, inf) or +infinity.
// Infinity is a distinguished state, never a large sentinel.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  explicit ExtReal(double v);  // throws std::invalid_argument on negative or NaN

  static constexpr ExtReal infinity() { return ExtReal(Tag{}); }
  static constexpr ExtReal zero() { return ExtReal(); }

  [[nodiscard]] constexpr bool is_infinite() const { return inf_; }
  [[nodiscard]] constexpr bool is_finite() const { return !inf_; }
  // Finite value; +inf as an IEEE double when infinite.
  [[nodiscard]] constexpr double value() const {
    return inf_ ? std::numeric_limits<double>::infinity() : v_;
  }

  friend ExtReal operator+(ExtReal a, ExtReal b);
  // 0 * inf = 0, the measure-theoretic convention used for vacuous bounds.
  friend ExtReal operator*(ExtReal a, ExtReal b);
  friend ExtReal operator*(double scale, ExtReal b);

  friend constexpr bool operator==(ExtReal a, ExtReal b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
  }
  friend constexpr std::partial_ordering operator<=>(ExtReal a, ExtReal b) {
    if (a.inf_ || b.inf_) return a.inf_ <=> b.inf_;
    return a.v_ <=> b.v_;
  }

  [[nodiscard]] std::string str() const;

 private:
  struct Tag {};
  constexpr explicit ExtReal(Tag) : inf_(true) {}
  double v_ = 0.0;
  bool inf_ = false;
};

std::ostream& operator<<(std::ostream& os, ExtReal x);

ExtReal min(ExtReal a, ExtReal b);
ExtReal max(ExtReal a, ExtReal b);

// a/b for a, b >= 0 with the conventions x/inf = 0 (x finite), inf/finite = inf.
// inf/inf and 0/0 are undefined; callers must exclude them.
ExtReal ratio(ExtReal a, ExtReal b);

}  // namespace regmod
