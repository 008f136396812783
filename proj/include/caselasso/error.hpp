#pragma once

#include <stdexcept>
#include <string>

namespace caselasso {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad shapes, non-finite values,
/// out-of-range indices). The CLI maps this to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed: non-convergence, singular systems,
/// inconsistent path states. The CLI maps this to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Coordinate descent ran out of sweeps. Carries the violation reached.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double violation)
      : NumericalError(what), violation_(violation) {}
  double violation() const noexcept { return violation_; }

 private:
  double violation_;
};

/// A rank-one Gram update hit a (near) singular Schur complement.
class SingularUpdateError : public NumericalError {
 public:
  SingularUpdateError(const std::string& what, long column)
      : NumericalError(what), column_(column) {}
  long column() const noexcept { return column_; }

 private:
  long column_;
};

}  // namespace caselasso
