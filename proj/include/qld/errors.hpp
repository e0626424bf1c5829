#pragma once

#include <stdexcept>
#include <string>

namespace qld {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested value outside the attainable range (e.g. theta >= theta_bar).
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// A deformed moment-generating function is infinite where a finite value is needed.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature or root finding failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}

  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

}  // namespace qld
