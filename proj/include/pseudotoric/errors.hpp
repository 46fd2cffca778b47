#pragma once

#include <stdexcept>
#include <string>

namespace pseudotoric {

/// Invalid parameters, mismatched registries, unsupported sizes. Maps to CLI exit code 2.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mathematically undefined operation (division by zero, pole produced by substitution).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numeric evaluation too close to a pole.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, double denominator_magnitude)
      : std::runtime_error(what), denominator_magnitude_(denominator_magnitude) {}

  double denominator_magnitude() const noexcept { return denominator_magnitude_; }

 private:
  double denominator_magnitude_;
};

/// Rejection sampling ran out of draws. Maps to CLI exit code 3.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ill-conditioned linear algebra in the numeric engine.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Jacobian of the fibration lost rank: the point is close to the non-free locus.
class NearSingularFiber : public NumericalError {
 public:
  NearSingularFiber(const std::string& what, double gap_ratio)
      : NumericalError(what), gap_ratio_(gap_ratio) {}

  double gap_ratio() const noexcept { return gap_ratio_; }

 private:
  double gap_ratio_;
};

}  // namespace pseudotoric
