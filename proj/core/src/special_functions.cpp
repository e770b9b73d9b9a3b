#include "ciindex/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ciindex::special {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

void require_open_unit(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError(std::string(what) + ": p must lie in (0,1), got " +
                      std::to_string(p));
  }
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  return h;
}

double gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 100000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma Q(a, x) by continued fraction, for x >= a + 1.
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Root of cdf(x) = p on [lo, hi] by Newton steps, falling back to bisection
// whenever a step leaves the bracket.
template <class Cdf, class Pdf>
double invert(Cdf cdf, Pdf pdf, double p, double lo, double hi, double x) {
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 0; it < 2000; ++it) {
    const double f = cdf(x) - p;
    if (f == 0.0) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double dens = pdf(x);
    double next = (dens > 0.0 && std::isfinite(dens)) ? x - f / dens : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 2.0 * kEps * std::fabs(x) ||
        hi - lo <= 2.0 * kEps * std::max(std::fabs(lo), std::fabs(hi))) {
      return next;
    }
    x = next;
  }
  return x;
}

// Grows hi until cdf(hi) >= p.
template <class Cdf>
double bracket_upper(Cdf cdf, double p, double start) {
  double hi = std::max(start, 1.0);
  while (cdf(hi) < p) {
    hi *= 2.0;
    if (!std::isfinite(hi)) break;
  }
  return hi;
}

}  // namespace

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double regularized_beta(double x, double a, double b) {
  require_positive(a, "beta shape a");
  require_positive(b, "beta shape b");
  if (std::isnan(x)) throw DomainError("regularized_beta: NaN argument");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double regularized_gamma_p(double a, double x) {
  require_positive(a, "gamma shape");
  if (std::isnan(x)) throw DomainError("regularized_gamma_p: NaN argument");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double normal_cdf(double x) {
  if (!std::isfinite(x)) throw DomainError("normal_cdf: non-finite argument");
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_quantile(double p) {
  require_open_unit(p, "normal_quantile");
  // Rational approximation (Acklam), relative error ~1e-9 ...
  static constexpr std::array<double, 6> a{
      -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // ... refined by one Halley step to full double precision. The upper tail
  // is refined against the complementary cdf to avoid cancellation.
  double e;
  if (p > 0.5) {
    e = (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
  } else {
    e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  }
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double student_t_cdf(double t, double df) {
  require_positive(df, "t degrees of freedom");
  if (std::isnan(t)) throw DomainError("student_t_cdf: NaN argument");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double t2 = t * t;
  double lower_tail;
  if (t2 < df) {
    const double central = regularized_beta(t2 / (df + t2), 0.5, 0.5 * df);
    lower_tail = 0.5 * (1.0 - central);
  } else {
    lower_tail = 0.5 * regularized_beta(df / (df + t2), 0.5 * df, 0.5);
  }
  return t > 0 ? 1.0 - lower_tail : lower_tail;
}

double student_t_pdf(double t, double df) {
  require_positive(df, "t degrees of freedom");
  const double logc = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                      0.5 * std::log(df * std::numbers::pi);
  return std::exp(logc - 0.5 * (df + 1.0) * std::log1p(t * t / df));
}

double student_t_quantile(double p, double df) {
  require_open_unit(p, "student_t_quantile");
  require_positive(df, "t degrees of freedom");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, df);
  auto cdf = [df](double t) { return student_t_cdf(t, df); };
  auto pdf = [df](double t) { return student_t_pdf(t, df); };
  const double start = normal_quantile(p);
  const double hi = bracket_upper(cdf, p, 2.0 * start);
  return invert(cdf, pdf, p, 0.0, hi, start);
}

double chi_square_cdf(double x, double df) {
  require_positive(df, "chi-square degrees of freedom");
  if (std::isnan(x)) throw DomainError("chi_square_cdf: NaN argument");
  return regularized_gamma_p(0.5 * df, 0.5 * x);
}

double chi_square_pdf(double x, double df) {
  require_positive(df, "chi-square degrees of freedom");
  if (x < 0.0) return 0.0;
  const double k = 0.5 * df;
  if (x == 0.0) {
    if (k < 1.0) return std::numeric_limits<double>::infinity();
    return k == 1.0 ? 0.5 : 0.0;
  }
  return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::numbers::ln2 -
                  std::lgamma(k));
}

double chi_square_quantile(double p, double df) {
  if (df == 0.0) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("chi_square_quantile: p");
    return 0.0;
  }
  require_open_unit(p, "chi_square_quantile");
  require_positive(df, "chi-square degrees of freedom");
  auto cdf = [df](double x) { return chi_square_cdf(x, df); };
  auto pdf = [df](double x) { return chi_square_pdf(x, df); };
  // Wilson-Hilferty starting point.
  const double z = normal_quantile(p);
  const double h = 2.0 / (9.0 * df);
  double start = df * std::pow(std::max(1.0 - h + z * std::sqrt(h), 1e-3), 3);
  const double hi = bracket_upper(cdf, p, 2.0 * start);
  return invert(cdf, pdf, p, 0.0, hi, start);
}

double beta_cdf(double x, double a, double b) {
  return regularized_beta(x, a, b);
}

double beta_pdf(double x, double a, double b) {
  require_positive(a, "beta shape a");
  require_positive(b, "beta shape b");
  if (x < 0.0 || x > 1.0) return 0.0;
  if (x == 0.0 || x == 1.0) {
    const double e = x == 0.0 ? a : b;
    if (e < 1.0) return std::numeric_limits<double>::infinity();
    if (e > 1.0) return 0.0;
    return std::exp(-log_beta(a, b));
  }
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) -
                  log_beta(a, b));
}

double beta_quantile(double p, double a, double b) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("beta_quantile: p outside [0,1]");
  }
  if (!(a >= 0.0 && b >= 0.0) || (a == 0.0 && b == 0.0)) {
    throw DomainError("beta_quantile: invalid shape parameters");
  }
  if (a == 0.0) return 0.0;
  if (b == 0.0) return 1.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  // Closed forms for unit shapes keep the boundary cases exact.
  if (a == 1.0) return -std::expm1(std::log1p(-p) / b);
  if (b == 1.0) return std::pow(p, 1.0 / a);
  auto cdf = [a, b](double x) { return regularized_beta(x, a, b); };
  auto pdf = [a, b](double x) { return beta_pdf(x, a, b); };
  return invert(cdf, pdf, p, 0.0, 1.0, a / (a + b));
}

double cdf(const Distribution& dist, double x) {
  struct Visitor {
    double x;
    double operator()(const Normal&) const { return normal_cdf(x); }
    double operator()(const StudentT& d) const { return student_t_cdf(x, d.df); }
    double operator()(const ChiSquare& d) const {
      return chi_square_cdf(x, d.df);
    }
    double operator()(const Beta& d) const { return beta_cdf(x, d.a, d.b); }
  };
  return std::visit(Visitor{x}, dist);
}

double quantile(const QuantileRequest& req) {
  struct Visitor {
    double p;
    double operator()(const Normal&) const { return normal_quantile(p); }
    double operator()(const StudentT& d) const {
      return student_t_quantile(p, d.df);
    }
    double operator()(const ChiSquare& d) const {
      return chi_square_quantile(p, d.df);
    }
    double operator()(const Beta& d) const { return beta_quantile(p, d.a, d.b); }
  };
  return std::visit(Visitor{req.p.value()}, req.distribution);
}

}  // namespace ciindex::special
