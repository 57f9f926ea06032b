#include "spdemove/errors.hpp"

#include <sstream>

namespace spdemove {

namespace {

std::string overflow_message(std::size_t mode_index, std::size_t step, double value) {
  std::ostringstream os;
  os << "path overflow in mode " << mode_index << " at step " << step << " (value " << value
     << ")";
  return os.str();
}

std::string singular_message(double determinant, double scale) {
  std::ostringstream os;
  os.precision(17);
  os << "singular normal equations: determinant I1*I2 - I3^2 = " << determinant
     << " (relative " << (scale > 0.0 ? determinant / scale : 0.0) << ")";
  return os.str();
}

}  // namespace

PathOverflowError::PathOverflowError(std::size_t mode_index, std::size_t step, double value)
    : NumericalError(overflow_message(mode_index, step, value)),
      mode_index_(mode_index),
      step_(step) {}

SingularityError::SingularityError(double determinant, double scale)
    : NumericalError(singular_message(determinant, scale)), determinant_(determinant) {}

}  // namespace spdemove
