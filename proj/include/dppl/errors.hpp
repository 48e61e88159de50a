#pragma once

#include <stdexcept>
#include <string>

namespace dppl {

// A run that cannot continue: ODE divergence, invalid distribution
// parameters, zero total inference weight and similar. Maps to CLI exit 3.
class RuntimeAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated internal invariant (unreachable for well-typed programs).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace dppl
