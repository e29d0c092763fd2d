#pragma once

#include <stdexcept>

namespace cvqkd {

// Runtime numerical failure: unphysical covariance data, symplectic spectrum
// pairing failure, or a violated bisection precondition. The CLI maps this
// class to exit code 2 (argument/validation errors map to exit code 1).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace cvqkd
