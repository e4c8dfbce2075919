#pragma once

#include <stdexcept>
#include <string>

namespace regmod {

// Objects from different spaces were combined.
struct DomainMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An enumeration would exceed the configured budget.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An operation's stated precondition does not hold.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A theorem hypothesis fails at the measured scale. Distinct from an audit failure.
struct HypothesisViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or invalid input data (files, matrices, scenario fields).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An internal numerical routine did not converge or produced an infeasible answer.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace regmod
