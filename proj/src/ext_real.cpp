#include "regmod/ext_real.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace regmod {

ExtReal::ExtReal(double v) {
  if (std::isnan(v) || v < 0.0) throw std::invalid_argument("ExtReal: negative or NaN value");
  if (std::isinf(v)) {
    inf_ = true;
  } else {
    v_ = v;
  }
}

ExtReal operator+(ExtReal a, ExtReal b) {
  if (a.inf_ || b.inf_) return ExtReal::infinity();
  return ExtReal(a.v_ + b.v_);
}

ExtReal operator*(ExtReal a, ExtReal b) {
  if ((a.is_finite() && a.v_ == 0.0) || (b.is_finite() && b.v_ == 0.0)) return ExtReal::zero();
  if (a.inf_ || b.inf_) return ExtReal::infinity();
  return ExtReal(a.v_ * b.v_);
}

ExtReal operator*(double scale, ExtReal b) { return ExtReal(scale) * b; }

std::string ExtReal::str() const {
  if (inf_) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << v_;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, ExtReal x) { return os << x.str(); }

ExtReal min(ExtReal a, ExtReal b) { return b < a ? b : a; }
ExtReal max(ExtReal a, ExtReal b) { return a < b ? b : a; }

ExtReal ratio(ExtReal a, ExtReal b) {
  if (b.is_infinite()) {
    if (a.is_infinite()) throw std::domain_error("ExtReal ratio inf/inf");
    return ExtReal::zero();
  }
  if (b.value() == 0.0) throw std::domain_error("ExtReal ratio by zero");
  if (a.is_infinite()) return ExtReal::infinity();
  return ExtReal(a.value() / b.value());
}

}  // namespace regmod
