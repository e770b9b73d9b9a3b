#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "ciindex/types.hpp"

namespace ciindex {

enum class ProportionMethod {
  exact,          ///< Clopper-Pearson beta quantiles
  wald,
  arcsin,
  arcsin_cc,
  pois,           ///< chi-square (Poisson) limits
  bcg,            ///< Wilson center with Wald half-width
  wilson,
  wilson_cc,
  agresti_coull,
  add4,
  mid_p,          ///< beta quantiles with half-integer shapes
};

inline constexpr ProportionMethod kAllProportionMethods[] = {
    ProportionMethod::exact,     ProportionMethod::wald,
    ProportionMethod::arcsin,    ProportionMethod::arcsin_cc,
    ProportionMethod::pois,      ProportionMethod::bcg,
    ProportionMethod::wilson,    ProportionMethod::wilson_cc,
    ProportionMethod::agresti_coull, ProportionMethod::add4,
    ProportionMethod::mid_p};

std::string_view to_string(ProportionMethod method);
std::optional<ProportionMethod> parse_proportion_method(std::string_view name);

/// x successes out of n trials.
struct BinomialObservation {
  std::uint64_t n = 0;
  std::uint64_t x = 0;

  void validate() const;
  double p_hat() const noexcept {
    return static_cast<double>(x) / static_cast<double>(n);
  }
};

/// Interval for p. Endpoints are clipped to [0,1]; x = 0 and x = n are
/// handled by boundary conventions rather than errors.
ConfidenceInterval proportion_interval(ProportionMethod method,
                                       const BinomialObservation& obs,
                                       Probability alpha);

/// Exact coverage and expected length under Bin(n, p), summing the pmf over
/// x = 0..n. Requires n <= 10000.
IntervalPerformance exact_performance(ProportionMethod method, std::uint64_t n,
                                      Probability p, Probability alpha);

}  // namespace ciindex
