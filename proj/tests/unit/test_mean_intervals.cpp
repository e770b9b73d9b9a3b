#include <catch_amalgamated.hpp>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ciindex/mean_intervals.hpp"

using namespace ciindex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Probability kAlpha(0.05);

double t_quantile(double p, double df) {
  return boost::math::quantile(boost::math::students_t_distribution<>(df), p);
}
double z_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<>(), p);
}
double z_cdf(double x) { return boost::math::cdf(boost::math::normal_distribution<>(), x); }

double plain_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Textbook BCa (Efron & Tibshirani ch. 14) on explicit resamples.
ConfidenceInterval reference_bca(const std::vector<double>& x, double alpha, std::size_t B,
                                 const SeedSpec& seed) {
  const double theta = plain_mean(x);
  std::vector<double> boot;
  for (std::size_t j = 0; j < B; ++j) {
    boot.push_back(plain_mean(bootstrap_resample(x, seed.child(j))));
  }
  std::sort(boot.begin(), boot.end());
  double below = static_cast<double>(std::count_if(boot.begin(), boot.end(),
                                                   [&](double b) { return b < theta; }));
  below = std::clamp(below, 0.5, static_cast<double>(B) - 0.5);
  const double z0 = z_quantile(below / static_cast<double>(B));

  const std::size_t n = x.size();
  std::vector<double> jack(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) s += x[k];
    }
    jack[i] = s / static_cast<double>(n - 1);
  }
  const double jbar = plain_mean(jack);
  double num = 0.0, den = 0.0;
  for (double j : jack) {
    num += std::pow(jbar - j, 3);
    den += std::pow(jbar - j, 2);
  }
  const double a = num / (6.0 * std::pow(den, 1.5));

  auto level = [&](double z) {
    return z_cdf(z0 + (z0 + z) / (1.0 - a * (z0 + z)));
  };
  auto order_stat = [&](double p) {
    const auto k = static_cast<std::size_t>(
        std::clamp(std::ceil(p * static_cast<double>(B) - 1e-9), 1.0, static_cast<double>(B)));
    return boot[k - 1];
  };
  return {order_stat(level(z_quantile(alpha / 2))), order_stat(level(z_quantile(1 - alpha / 2)))};
}

}  // namespace

TEST_CASE("normal theory interval", "[mean]") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const auto ci = normal_theory_interval(x, kAlpha);
  const double half = z_quantile(0.975) * std::sqrt(2.5) / std::sqrt(5.0);
  CHECK_THAT(ci.lower, WithinAbs(3.0 - half, 1e-12));
  CHECK_THAT(ci.upper, WithinAbs(3.0 + half, 1e-12));
  CHECK_THROWS_AS(normal_theory_interval(std::vector<double>{1.0}, kAlpha), InsufficientData);
}

TEST_CASE("Johnson t interval, symmetric sample", "[mean]") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const auto ci = johnson_t_interval(x, kAlpha);
  CHECK_THAT(ci.lower, WithinAbs(1.0368, 1e-3));
  CHECK_THAT(ci.upper, WithinAbs(4.9632, 1e-3));
  CHECK_THAT(0.5 * (ci.lower + ci.upper), WithinAbs(3.0, 1e-15));
}

TEST_CASE("Johnson t interval, skewed sample", "[mean]") {
  const std::vector<double> x{0, 0, 0, 1, 10};
  const double n = 5.0;
  const double xbar = 2.2;
  double m2 = 0.0, m3 = 0.0, ss = 0.0;
  for (double v : x) {
    m2 += std::pow(v - xbar, 2) / n;
    m3 += std::pow(v - xbar, 3) / n;
    ss += std::pow(v - xbar, 2);
  }
  const double k3 = m3 / std::pow(m2, 1.5);
  const double s = std::sqrt(ss / (n - 1));
  const double t = t_quantile(0.975, n - 1);
  // Shift expressed in standard-error units s / sqrt(n).
  const double shift = k3 / (6 * std::sqrt(n)) * (1 + 2 * t * t) * s / std::sqrt(n);
  const auto ci = johnson_t_interval(x, kAlpha);
  CHECK_THAT(0.5 * (ci.lower + ci.upper), WithinAbs(xbar + shift, 1e-10));
  CHECK_THAT(0.5 * (ci.upper - ci.lower), WithinAbs(t * s / std::sqrt(n), 1e-10));
  CHECK(0.5 * (ci.lower + ci.upper) > xbar);
}

TEST_CASE("Johnson t interval is location-scale equivariant", "[mean][property]") {
  const std::vector<double> x{0.3, 1.9, 0.1, 5.2, 2.2, 0.8, 0.4};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * v - 7.0);
  const auto cx = johnson_t_interval(x, kAlpha);
  const auto cy = johnson_t_interval(y, kAlpha);
  CHECK_THAT(cy.lower, WithinAbs(3.0 * cx.lower - 7.0, 1e-12));
  CHECK_THAT(cy.upper, WithinAbs(3.0 * cx.upper - 7.0, 1e-12));
}

TEST_CASE("Johnson t edge cases", "[mean]") {
  CHECK_THROWS_AS(johnson_t_interval(std::vector<double>{1.0, 2.0}, kAlpha), InsufficientData);
  const std::vector<double> c(6, 4.25);
  CHECK(johnson_t_interval(c, kAlpha) == ConfidenceInterval{4.25, 4.25});
}

TEST_CASE("half-widths shrink as alpha grows", "[mean][property]") {
  const std::vector<double> x{2.1, 0.4, 3.3, 1.8, 2.9, 0.7, 1.1};
  double prev_nt = INFINITY, prev_jt = INFINITY;
  for (double a = 0.01; a < 1.0; a += 0.01) {
    const auto nt = normal_theory_interval(x, Probability(a));
    const auto jt = johnson_t_interval(x, Probability(a));
    CHECK(nt.length() < prev_nt);
    CHECK(jt.length() < prev_jt);
    prev_nt = nt.length();
    prev_jt = jt.length();
  }
}

TEST_CASE("percentile interval uses the ceil(pB) order statistic", "[mean]") {
  std::vector<double> sorted(200);
  std::iota(sorted.begin(), sorted.end(), 1.0);
  const auto ci = percentile_from_sorted(sorted, kAlpha);
  CHECK(ci.lower == 5.0);    // ceil(0.025 * 200) = 5
  CHECK(ci.upper == 195.0);  // ceil(0.975 * 200) = 195
  CHECK(empirical_quantile(sorted, 0.0) == 1.0);
  CHECK(empirical_quantile(sorted, 1.0) == 200.0);
}

TEST_CASE("percentile endpoints stay within the bootstrap range", "[mean][property]") {
  std::mt19937 gen(5);
  std::lognormal_distribution<double> dist(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x(12);
    for (auto& v : x) v = dist(gen);
    const SeedSpec seed{77, {static_cast<std::uint64_t>(rep)}};
    const auto reps = bootstrap_replicates(x, 300, seed.key(), false);
    const auto [lo, hi] = std::minmax_element(reps.means.begin(), reps.means.end());
    const auto ci = bootstrap_percentile_interval(x, kAlpha, 300, seed);
    CHECK(ci.lower >= *lo);
    CHECK(ci.upper <= *hi);
    CHECK(ci.lower <= ci.upper);
  }
}

TEST_CASE("bootstrap replicates follow bootstrap_resample streams", "[mean]") {
  const std::vector<double> x{1.5, -2.0, 3.25, 8.0, 0.5};
  const SeedSpec seed{11, {4, 2}};
  const auto reps = bootstrap_replicates(x, 40, seed.key(), true);
  REQUIRE(reps.means.size() == 40);
  REQUIRE(reps.sds.size() == 40);
  for (std::size_t j = 0; j < 40; ++j) {
    const auto r = bootstrap_resample(x, seed.child(j));
    const double m = plain_mean(r);
    double ss = 0.0;
    for (double v : r) ss += (v - m) * (v - m);
    CHECK_THAT(reps.means[j], WithinAbs(m, 1e-12));
    CHECK_THAT(reps.sds[j], WithinAbs(std::sqrt(ss / 4.0), 1e-12));
  }
}

TEST_CASE("BCa matches a step-by-step reference", "[mean][oracle]") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const SeedSpec seed{20240611, {0, 0}};
  const auto ci = bca_interval(x, kAlpha, 2000, seed);
  const auto ref = reference_bca(x, 0.05, 2000, seed);
  CHECK_THAT(ci.lower, WithinAbs(ref.lower, 1e-12));
  CHECK_THAT(ci.upper, WithinAbs(ref.upper, 1e-12));

  const std::vector<double> skewed{0.2, 0.1, 0.4, 3.9, 0.3, 1.2, 0.05, 7.5, 0.6, 0.9};
  const auto ci2 = bca_interval(skewed, kAlpha, 1000, SeedSpec{3, {1}});
  const auto ref2 = reference_bca(skewed, 0.05, 1000, SeedSpec{3, {1}});
  CHECK_THAT(ci2.lower, WithinAbs(ref2.lower, 1e-12));
  CHECK_THAT(ci2.upper, WithinAbs(ref2.upper, 1e-12));
}

TEST_CASE("BCa reduces to percentile when z0 = 0 and a = 0", "[mean]") {
  // 2k+1 symmetric values with theta_hat at the median: exactly half below.
  std::vector<double> sorted;
  for (int i = 1; i <= 100; ++i) sorted.push_back(-i);
  for (int i = 1; i <= 100; ++i) sorted.push_back(i);
  std::sort(sorted.begin(), sorted.end());
  CHECK(bias_correction(sorted, 0.0) == 0.0);
  CHECK(bca_from_sorted(sorted, 0.0, 0.0, kAlpha) == percentile_from_sorted(sorted, kAlpha));
}

TEST_CASE("BCa degenerate inputs", "[mean]") {
  const std::vector<double> c(8, -1.75);
  CHECK(bca_interval(c, kAlpha, 200, SeedSpec{1, {}}) == ConfidenceInterval{-1.75, -1.75});
  CHECK(bootstrap_percentile_interval(c, kAlpha, 200, SeedSpec{1, {}}) ==
        ConfidenceInterval{-1.75, -1.75});
  CHECK(jackknife_acceleration(c) == 0.0);
  // z0 clipping at counts 0 and B.
  const std::vector<double> s{1.0, 2.0, 3.0, 4.0};
  CHECK_THAT(bias_correction(s, 0.0), WithinAbs(z_quantile(0.5 / 4.0), 1e-12));
  CHECK_THAT(bias_correction(s, 9.0), WithinAbs(z_quantile(3.5 / 4.0), 1e-12));
  // 1 - a w <= 0 sends the level to the matching end.
  CHECK(bca_level(0.0, 1.0, 2.0) == 1.0);
  CHECK(bca_level(0.0, -1.0, -2.0) == 0.0);
}

TEST_CASE("all intervals are ordered", "[mean][property]") {
  std::mt19937 gen(9);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int rep = 0; rep < 40; ++rep) {
    std::vector<double> x(3 + rep % 10);
    for (auto& v : x) v = std::exp(dist(gen));
    for (auto m : kAllMeanMethods) {
      const auto ci = mean_interval({m, 150}, x, kAlpha, SeedSpec{1, {std::uint64_t(rep)}});
      CHECK(ci.lower <= ci.upper);
    }
  }
}

TEST_CASE("method names round-trip", "[mean]") {
  for (auto m : kAllMeanMethods) CHECK(parse_mean_method(to_string(m)) == m);
  CHECK(parse_mean_method("percentile") == MeanMethod::bootstrap_percentile);
  CHECK_FALSE(parse_mean_method("studentized").has_value());
}

TEST_CASE("alpha must be inside (0, 1)", "[mean]") {
  const std::vector<double> x{1, 2, 3};
  CHECK_THROWS_AS(normal_theory_interval(x, Probability(0.0)), DomainError);
  CHECK_THROWS_AS(johnson_t_interval(x, Probability(1.0)), DomainError);
}
