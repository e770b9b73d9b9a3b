#include "ciindex/proportion_intervals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ciindex/special_functions.hpp"

namespace ciindex {
namespace {

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

ConfidenceInterval clipped(double lower, double upper) {
  ConfidenceInterval ci{clip01(lower), clip01(upper)};
  if (ci.lower > ci.upper) std::swap(ci.lower, ci.upper);
  return ci;
}

ConfidenceInterval symmetric(double center, double half) {
  return clipped(center - half, center + half);
}

// sin^2 of an angle clamped to [0, pi/2], the range where sin^2 is monotone.
double sin2(double angle) {
  const double s = std::sin(std::clamp(angle, 0.0, 0.5 * std::numbers::pi));
  return s * s;
}

ConfidenceInterval arcsine(double ratio, double half_angle) {
  const double center = std::asin(std::sqrt(clip01(ratio)));
  return clipped(sin2(center - half_angle), sin2(center + half_angle));
}

}  // namespace

std::string_view to_string(ProportionMethod method) {
  switch (method) {
    case ProportionMethod::exact: return "exact";
    case ProportionMethod::wald: return "wald";
    case ProportionMethod::arcsin: return "arcsin";
    case ProportionMethod::arcsin_cc: return "arcsin_cc";
    case ProportionMethod::pois: return "pois";
    case ProportionMethod::bcg: return "bcg";
    case ProportionMethod::wilson: return "wilson";
    case ProportionMethod::wilson_cc: return "wilson_cc";
    case ProportionMethod::agresti_coull: return "agresti_coull";
    case ProportionMethod::add4: return "add4";
    case ProportionMethod::mid_p: return "mid_p";
  }
  return "unknown";
}

std::optional<ProportionMethod> parse_proportion_method(std::string_view name) {
  for (auto m : kAllProportionMethods) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

void BinomialObservation::validate() const {
  if (n == 0) throw DomainError("binomial observation needs n >= 1");
  if (x > n) throw DomainError("binomial observation has x > n");
}

ConfidenceInterval proportion_interval(ProportionMethod method,
                                       const BinomialObservation& obs,
                                       Probability alpha) {
  obs.validate();
  if (!(alpha.value() > 0.0 && alpha.value() < 1.0)) {
    throw DomainError("alpha must lie in (0,1)");
  }
  const double n = static_cast<double>(obs.n);
  const double x = static_cast<double>(obs.x);
  const double a = alpha.value();
  const double z = special::normal_quantile(1.0 - 0.5 * a);
  const double z2 = z * z;
  const double p_hat = x / n;
  // Shared center of the Wilson, BCG and Agresti-Coull intervals.
  const double tilde = (x + 0.5 * z2) / (n + z2);

  switch (method) {
    case ProportionMethod::exact:
      return clipped(special::beta_quantile(0.5 * a, x, n - x + 1.0),
                     special::beta_quantile(1.0 - 0.5 * a, x + 1.0, n - x));
    case ProportionMethod::wald:
      return symmetric(p_hat, z * std::sqrt(p_hat * (1.0 - p_hat) / n));
    case ProportionMethod::arcsin:
      return arcsine((x - 0.5) / n, z / (2.0 * std::sqrt(n)));
    case ProportionMethod::arcsin_cc:
      return arcsine((x - 0.125) / (n + 0.75), z / (2.0 * std::sqrt(n + 0.5)));
    case ProportionMethod::pois:
      return clipped(special::chi_square_quantile(0.5 * a, 2.0 * x) / (2.0 * n),
                     special::chi_square_quantile(1.0 - 0.5 * a, 2.0 * (x + 1.0)) /
                         (2.0 * n));
    case ProportionMethod::bcg:
      return symmetric(tilde, z * std::sqrt(x / (n * n) * (1.0 - p_hat)));
    case ProportionMethod::wilson:
      return symmetric(tilde, std::sqrt(n * z2 / ((n + z2) * (n + z2)) *
                                        (p_hat * (1.0 - p_hat) + z2 / (4.0 * n))));
    case ProportionMethod::wilson_cc: {
      const double lo_root =
          std::max(0.0, z2 - 2.0 - 1.0 / n + 4.0 * x * (1.0 - p_hat + 1.0 / n));
      const double hi_root =
          std::max(0.0, z2 + 2.0 - 1.0 / n + 4.0 * x * (1.0 - p_hat - 1.0 / n));
      const double denom = 2.0 * (n + z2);
      return clipped((2.0 * x + z2 - 1.0 - z * std::sqrt(lo_root)) / denom,
                     (2.0 * x + z2 + 1.0 + z * std::sqrt(hi_root)) / denom);
    }
    case ProportionMethod::agresti_coull:
      return symmetric(tilde, z * std::sqrt(tilde * (1.0 - tilde) / (n + z2)));
    case ProportionMethod::add4: {
      const double c = (x + 2.0) / (n + 4.0);
      return symmetric(c, z * std::sqrt(c * (1.0 - c) / (n + 4.0)));
    }
    case ProportionMethod::mid_p:
      return clipped(special::beta_quantile(0.5 * a, x + 0.5, n - x + 0.5),
                     special::beta_quantile(1.0 - 0.5 * a, x + 0.5, n - x + 0.5));
  }
  throw DomainError("unknown proportion method");
}

IntervalPerformance exact_performance(ProportionMethod method, std::uint64_t n,
                                      Probability p, Probability alpha) {
  if (n == 0 || n > 10000) {
    throw DomainError("exact_performance supports 1 <= n <= 10000");
  }
  const double pv = p.value();
  const double nd = static_cast<double>(n);
  IntervalPerformance perf;
  for (std::uint64_t x = 0; x <= n; ++x) {
    const double xd = static_cast<double>(x);
    double pmf;
    if (pv == 0.0) {
      pmf = x == 0 ? 1.0 : 0.0;
    } else if (pv == 1.0) {
      pmf = x == n ? 1.0 : 0.0;
    } else {
      pmf = std::exp(std::lgamma(nd + 1.0) - std::lgamma(xd + 1.0) -
                     std::lgamma(nd - xd + 1.0) + xd * std::log(pv) +
                     (nd - xd) * std::log1p(-pv));
    }
    if (pmf == 0.0) continue;
    const auto ci = proportion_interval(method, {n, x}, alpha);
    if (ci.contains(pv)) perf.coverage += pmf;
    perf.mean_length += pmf * ci.length();
  }
  perf.coverage = std::min(perf.coverage, 1.0);
  return perf;
}

}  // namespace ciindex
