#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ciindex {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Too few observations for the requested estimator.
class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A real number in [0, 1]. Construction validates the range.
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw DomainError("probability outside [0,1]: " + std::to_string(value));
    }
  }

  constexpr double value() const noexcept { return value_; }
  constexpr operator double() const noexcept { return value_; }

 private:
  double value_ = 0.0;
};

/// Two-sided interval (lower, upper) on the parameter scale.
struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;

  double length() const noexcept { return upper - lower; }
  bool contains(double theta) const noexcept {
    return lower <= theta && theta <= upper;
  }
  friend bool operator==(const ConfidenceInterval&,
                         const ConfidenceInterval&) = default;
};

/// Empirical coverage and mean length of one estimator in one scenario.
struct IntervalPerformance {
  double coverage = 0.0;
  double mean_length = 0.0;

  /// Throws DomainError unless 0 <= coverage <= 1 and mean_length >= 0.
  void validate() const {
    if (!(coverage >= 0.0 && coverage <= 1.0)) {
      throw DomainError("coverage outside [0,1]");
    }
    if (!(mean_length >= 0.0) || !std::isfinite(mean_length)) {
      throw DomainError("mean length must be finite and non-negative");
    }
  }
};

}  // namespace ciindex
