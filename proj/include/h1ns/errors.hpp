#pragma once

#include <stdexcept>
#include <string>

namespace h1ns {

/// Precondition or parameter-range violation. CLI maps it to exit status 2.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A field or document that breaks reality, zero-mean or solenoidal invariants.
class InvariantViolation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Requested quadrature tolerance could not be met; carries the best bound reached.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Picard iteration did not contract within the iteration budget.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double time, double ratio)
      : std::runtime_error(what), time_(time), ratio_(ratio) {}
  double time() const noexcept { return time_; }
  double last_ratio() const noexcept { return ratio_; }

 private:
  double time_;
  double ratio_;
};

}  // namespace h1ns
