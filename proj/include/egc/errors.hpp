#pragma once

#include <stdexcept>
#include <string>

namespace egc {

/// Argument outside the mathematical domain of an operation, or a
/// (method, configuration) pair the method does not support.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its tolerance: series
/// non-convergence, quadrature budget exhausted, non-finite integrand.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature ran out of subdivisions. Carries the partial result.
class budget_exceeded : public numerical_error {
 public:
  budget_exceeded(const std::string& what, double partial_value, double error_estimate)
      : numerical_error(what), partial_value_(partial_value), error_estimate_(error_estimate) {}

  double partial_value() const noexcept { return partial_value_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double partial_value_;
  double error_estimate_;
};

/// A statistic has no finite value at the requested threshold (for
/// example the fade duration when the crossing rate underflows).
class undefined_statistic : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace egc
