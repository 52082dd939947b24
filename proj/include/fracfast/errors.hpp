#ifndef FRACFAST_ERRORS_HPP
#define FRACFAST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fracfast {

/// Argument outside the mathematical domain of an operation (poles, bad orders).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative numerical procedure did not converge.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested accuracy could not be reached; carries the achieved error estimate.
class AccuracyFailure : public NumericalFailure {
 public:
  AccuracyFailure(const std::string& what, double estimate)
      : NumericalFailure(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

/// Operation called in an invalid object state (missing samples, out of order).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace fracfast

#endif  // FRACFAST_ERRORS_HPP
