#pragma once

#include <stdexcept>
#include <string>

namespace tpump {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: violated precondition, malformed schedule, unknown preset name.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Integrator aborted: step-size underflow, non-finite state, excessive trace drift.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace tpump
