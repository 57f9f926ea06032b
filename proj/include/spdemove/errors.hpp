#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spdemove {

/// Invalid input: bad arguments, configuration, or precondition violations.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures that arise from the numerics rather than the inputs.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulated path left the representable range (or a configured bound).
class PathOverflowError : public NumericalError {
 public:
  PathOverflowError(std::size_t mode_index, std::size_t step, double value);

  std::size_t mode_index() const noexcept { return mode_index_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t mode_index_;
  std::size_t step_;
};

/// The 2x2 normal-equation determinant I1*I2 - I3^2 is (numerically) zero.
class SingularityError : public NumericalError {
 public:
  SingularityError(double determinant, double scale);

  double determinant() const noexcept { return determinant_; }

 private:
  double determinant_;
};

/// Every path in the ensemble is identically zero.
class DegenerateDataError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace spdemove
