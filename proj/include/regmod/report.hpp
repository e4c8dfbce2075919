#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace regmod {

enum class Verdict {
  pass,
  fail,
  not_applicable,   // the audited statement's hypothesis does not apply to this instance
  not_established,  // an antecedent was checked and does not hold, so implications were skipped
  scale_mismatch,   // values differ at a non-saturated window; not a failure
};

const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

// A named tuple of numbers attached to a report: an extremal pair, a counterexample, ...
struct Witness {
  std::string role;
  std::vector<double> values;
};

struct AuditReport {
  std::string kind;
  Verdict verdict = Verdict::pass;
  std::optional<double> value;                // headline number, +inf allowed
  std::map<std::string, double> window;       // radii the audit ran at
  std::vector<Witness> witnesses;
  std::map<std::string, double> constants;    // measured constants, +inf allowed
  std::vector<std::string> notes;

  [[nodiscard]] bool passed() const { return verdict == Verdict::pass; }
  void add_witness(std::string role, std::vector<double> values) {
    witnesses.push_back({std::move(role), std::move(values)});
  }
  void fail_with(std::string role, std::vector<double> values) {
    verdict = Verdict::fail;
    add_witness(std::move(role), std::move(values));
  }
};

}  // namespace regmod
