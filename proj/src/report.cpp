#include "regmod/report.hpp"

#include <cstdlib>
#include <stdexcept>

#include "regmod/errors.hpp"
#include "regmod/tolerance.hpp"

namespace regmod {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_applicable: return "not-applicable";
    case Verdict::not_established: return "not-established";
    case Verdict::scale_mismatch: return "scale-mismatch";
  }
  return "unknown";
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::pass, Verdict::fail, Verdict::not_applicable, Verdict::not_established,
                    Verdict::scale_mismatch}) {
    if (s == to_string(v)) return v;
  }
  throw InputError("unknown verdict '" + s + "'");
}

Tolerance& default_tolerance() {
  static Tolerance t;
  return t;
}

namespace {
std::size_t initial_budget() {
  if (const char* env = std::getenv("REGMOD_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 2048;
}
std::size_t& budget_slot() {
  static std::size_t b = initial_budget();
  return b;
}
}  // namespace

std::size_t enumeration_budget() { return budget_slot(); }
void set_enumeration_budget(std::size_t n) { budget_slot() = n; }

}  // namespace regmod
