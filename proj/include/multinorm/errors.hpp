#pragma once

#include <stdexcept>
#include <string>

namespace multinorm {

// Bad input: dimension mismatch, out-of-range parameter, malformed descriptor.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation called on an object in the wrong state (e.g. a body that is not
// volume-normalized where the formula needs it).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Request exceeds a hard computational budget (e.g. brute-force sign search).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace multinorm
