#pragma once

#include <stdexcept>
#include <string>

namespace mmwpt {

// Raised when an adaptive quadrature or a truncated series cannot reach the
// requested tolerance. Carries the best value obtained and its error estimate.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double value, double error_estimate)
      : std::runtime_error(what), value_(value), error_estimate_(error_estimate) {}

  double value() const noexcept { return value_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double value_;
  double error_estimate_;
};

}  // namespace mmwpt
