#include <catch_amalgamated.hpp>

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ciindex/calibration.hpp"

using namespace ciindex;
using Catch::Matchers::WithinAbs;

namespace {

const Probability kAlpha(0.05);

const std::vector<double>& sample10() {
  static const std::vector<double> x{2.31, 1.07, 2.94, 0.48, 2.02,
                                     3.15, 1.66, 2.49, 1.21, 2.70};
  return x;
}

}  // namespace

TEST_CASE("lambdas follow the studentized resample means", "[calibration][oracle]") {
  const auto& x = sample10();
  const SeedSpec seed{17, {0, 3}};
  const std::size_t B = 60;
  const auto result = calibrate_level(x, kAlpha, B, seed);
  REQUIRE(result.lambdas.size() == B);
  const double theta = std::accumulate(x.begin(), x.end(), 0.0) / 10.0;
  const boost::math::normal_distribution<> nd;
  for (std::size_t j = 0; j < B; ++j) {
    const auto r = bootstrap_resample(x, seed.child(j));
    const double m = std::accumulate(r.begin(), r.end(), 0.0) / 10.0;
    double ss = 0.0;
    for (double v : r) ss += (v - m) * (v - m);
    const double t = std::sqrt(10.0) * (m - theta) / std::sqrt(ss / 9.0);
    CHECK_THAT(result.lambdas[j], WithinAbs(boost::math::cdf(boost::math::complement(nd, std::fabs(t))), 1e-12));
    CHECK(result.lambdas[j] >= 0.0);
    CHECK(result.lambdas[j] <= 0.5);
  }
}

TEST_CASE("beta is the ceil(alpha B) order statistic with a 1/(2B) floor", "[calibration]") {
  std::vector<double> lambdas(100);
  for (std::size_t i = 0; i < 100; ++i) lambdas[i] = 0.004 * static_cast<double>(100 - i);
  // ceil(0.05 * 100) = 5th smallest = 0.02
  CHECK_THAT(calibrated_level(lambdas, kAlpha).value(), WithinAbs(0.02, 1e-15));

  // Five lambdas: the order statistic picks 0.01, the floor lifts it to 1/(2B).
  const std::vector<double> five{0.05, 0.01, 0.03, 0.04, 0.02};
  std::vector<double> sorted = five;
  std::sort(sorted.begin(), sorted.end());
  CHECK(empirical_quantile(sorted, 0.05) == 0.01);
  CHECK(calibrated_level(five, kAlpha).value() == 0.1);
}

TEST_CASE("degenerate lambdas", "[calibration]") {
  const std::vector<double> halves(200, 0.5);
  CHECK(calibrated_level(halves, kAlpha).value() == 0.5);

  BootstrapReplicates reps;
  reps.theta_hat = 1.0;
  reps.means = {1.0, 1.0, 2.0};
  reps.sds = {0.3, 0.0, 0.0};
  const auto l = calibration_lambdas(reps, 5);
  CHECK(l[0] == 0.5);  // t = 0
  CHECK(l[1] == 0.0);  // zero sd
  CHECK(l[2] == 0.0);
  CHECK_THROWS_AS(calibration_lambdas(BootstrapReplicates{1.0, {1.0}, {}}, 5), DomainError);
  CHECK_THROWS_AS(calibrated_level(std::vector<double>{}, kAlpha), DomainError);
}

TEST_CASE("beta stays within [1/(2B), 0.5]", "[calibration][property]") {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const auto x = draw_sample(LognormalModel{0.0, 1.0}, 5 + s % 20, SeedSpec{s, {}});
    const std::size_t B = 20 + 10 * (s % 7);
    const auto r = calibrate_level(x, kAlpha, B, SeedSpec{s, {1}});
    CHECK(r.beta.value() >= 1.0 / (2.0 * static_cast<double>(B)));
    CHECK(r.beta.value() <= 0.5);
    CHECK_FALSE(r.skipped);
  }
}

TEST_CASE("skip rule", "[calibration]") {
  CalibrationOptions near{0.953, 0.005};
  CalibrationOptions far{0.90, 0.005};
  CHECK(calibration_skipped(kAlpha, near));
  CHECK_FALSE(calibration_skipped(kAlpha, far));
  CHECK_FALSE(calibration_skipped(kAlpha, {}));

  const auto& x = sample10();
  const auto r = calibrate_level(x, kAlpha, 100, SeedSpec{1, {}}, near);
  CHECK(r.skipped);
  CHECK(r.beta.value() == kAlpha.value());
  CHECK(r.lambdas.empty());
  for (auto m : kAllMeanMethods) {
    const MeanEstimatorKind kind{m, 100};
    CHECK(calibrated_interval(kind, x, kAlpha, 100, SeedSpec{1, {}}, near) ==
          mean_interval(kind, x, kAlpha, SeedSpec{1, {}}));
  }
}

TEST_CASE("calibrated normal-theory interval widens when beta < alpha", "[calibration]") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto x = draw_sample(NormalModel{2.0, 1.0}, 10, SeedSpec{s, {}});
    const SeedSpec seed{s, {9}};
    const auto cal = calibrate_level(x, kAlpha, 200, seed);
    const auto plain = normal_theory_interval(x, kAlpha);
    const auto wide = calibrated_interval({MeanMethod::normal_theory, 200}, x, kAlpha, 200, seed);
    if (cal.beta.value() < kAlpha.value()) {
      CHECK(wide.length() > plain.length());
      CHECK(wide.lower <= plain.lower);
      CHECK(wide.upper >= plain.upper);
    }
  }
}

TEST_CASE("calibrated bootstrap intervals reuse the calibration resamples", "[calibration]") {
  const auto& x = sample10();
  const SeedSpec seed{5, {2, 2}};
  const auto cal = calibrate_level(x, kAlpha, 300, seed);
  const auto got = calibrated_interval({MeanMethod::bootstrap_percentile, 300}, x, kAlpha, 300, seed);
  CHECK(got == bootstrap_percentile_interval(x, cal.beta, 300, seed));
  const auto bca = calibrated_interval({MeanMethod::bca, 300}, x, kAlpha, 300, seed);
  CHECK(bca == bca_interval(x, cal.beta, 300, seed));
}

TEST_CASE("calibration is deterministic", "[calibration]") {
  const auto a = calibrate_level(sample10(), kAlpha, 150, SeedSpec{8, {1}});
  const auto b = calibrate_level(sample10(), kAlpha, 150, SeedSpec{8, {1}});
  CHECK(a.lambdas == b.lambdas);
  CHECK(a.beta.value() == b.beta.value());
}

TEST_CASE("calibration preconditions", "[calibration]") {
  CHECK_THROWS_AS(calibrate_level(std::vector<double>{1.0}, kAlpha, 10, SeedSpec{}), InsufficientData);
  CHECK_THROWS_AS(calibrate_level(sample10(), kAlpha, 1, SeedSpec{}), DomainError);
}
