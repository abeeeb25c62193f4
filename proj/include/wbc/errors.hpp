#pragma once

#include <stdexcept>
#include <string>

namespace wbc {

// Channel fails the ordering assumption needed by the construction.
struct DegenerateChannel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested set-construction method does not apply to the given channel family.
struct MethodUnsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Partition cell sizes match none of the four chaining cases.
struct CaseUndefined : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A chaining case matched but some required subset cannot be carved out.
struct InfeasiblePlan : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Block length / index-set shape violations.
struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A slot was fed a sequence of the wrong length.
struct LengthMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An exact enumeration would exceed the configured work budget.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent configuration input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wbc
