#pragma once

#include <stdexcept>
#include <string>

namespace ppma {

// Base class for every error raised by the library. The CLI maps the
// concrete type to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operation called for x in the wrong regime (e.g. endpoints outside the
// two-cut interval).
class RegimeError : public Error {
 public:
  using Error::Error;
};

// Argument too close to a lattice point of a meromorphic function.
class PoleError : public Error {
 public:
  using Error::Error;
};

// Series, root finder or quadrature failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Non-positive pivot, non-finite value, or integrator blowup.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Double precision is not enough for the requested parameters.
class PrecisionError : public Error {
 public:
  PrecisionError(const std::string& what, double max_safe_t)
      : Error(what), max_safe_t_(max_safe_t) {}
  double max_safe_t() const { return max_safe_t_; }

 private:
  double max_safe_t_;
};

}  // namespace ppma
