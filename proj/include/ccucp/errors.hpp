#pragma once

#include <stdexcept>
#include <string>

namespace ccucp {

// Bad input data: malformed files, parameter values out of range.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The model admits no feasible solution (or a commitment pattern admits no dispatch).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured resource limit was exceeded (scenario count, time budget, arithmetic range).
class LimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ccucp
