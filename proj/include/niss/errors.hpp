#pragma once

#include <stdexcept>
#include <string>

namespace niss {

// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Pmf off the simplex, probability outside [0,1], malformed parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Zero variance, vanishing Gram-Schmidt residual, degenerate flip probability.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Expectation vector or target outside the achievable set.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Randomized table or iterate violating its box / bias conditions.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration or dense storage above the hard cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

class SingularKernel : public Error {
 public:
  using Error::Error;
};

class UnboundedLp : public Error {
 public:
  using Error::Error;
};

class InfeasibleLp : public Error {
 public:
  using Error::Error;
};

}  // namespace niss
