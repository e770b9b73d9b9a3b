#pragma once

#include <variant>

#include "ciindex/types.hpp"

/// Distribution functions and quantiles for the standard normal, Student t,
/// chi-square and beta distributions.
///
/// Incomplete beta and gamma functions are evaluated with continued
/// fractions (modified Lentz) or series; quantiles are found by safeguarded
/// Newton iteration inside a bracketing interval. All functions are pure.
namespace ciindex::special {

struct Normal {};
struct StudentT {
  double df;
};
struct ChiSquare {
  double df;
};
struct Beta {
  double a;
  double b;
};

using Distribution = std::variant<Normal, StudentT, ChiSquare, Beta>;

struct QuantileRequest {
  Distribution distribution;
  Probability p;
};

// Regularized incomplete functions.
double regularized_beta(double x, double a, double b);
double regularized_gamma_p(double a, double x);
double log_beta(double a, double b);

/// Phi(x). Throws DomainError for non-finite x.
double normal_cdf(double x);
double normal_pdf(double x);
/// Phi^{-1}(p) for 0 < p < 1.
double normal_quantile(double p);

double student_t_cdf(double t, double df);
double student_t_pdf(double t, double df);
double student_t_quantile(double p, double df);

double chi_square_cdf(double x, double df);
double chi_square_pdf(double x, double df);
/// df == 0 is the point mass at zero and returns 0 for every p.
double chi_square_quantile(double p, double df);

double beta_cdf(double x, double a, double b);
double beta_pdf(double x, double a, double b);
/// Accepts p in [0,1]. A zero shape parameter collapses the distribution to a
/// boundary: a == 0 gives 0, b == 0 gives 1.
double beta_quantile(double p, double a, double b);

double cdf(const Distribution& dist, double x);
double quantile(const QuantileRequest& req);

}  // namespace ciindex::special
