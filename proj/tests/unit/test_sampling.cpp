#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ciindex/sampling.hpp"
#include "ciindex/special_functions.hpp"

using namespace ciindex;
using Catch::Matchers::WithinAbs;

namespace {

double mean_of(const Sample& s) {
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

}  // namespace

TEST_CASE("true parameter of each model", "[sampling]") {
  CHECK(true_parameter(NormalModel{2.0, 1.0}) == 2.0);
  CHECK_THAT(true_parameter(LognormalModel{0.0, 3.0}), WithinAbs(4.481689, 1e-6));
  CHECK(true_parameter(BinomialModel{10, 0.1}) == 0.1);
}

TEST_CASE("lognormal skewness", "[sampling]") {
  CHECK_THAT(lognormal_skewness(0.2), WithinAbs(1.516, 5e-3));
  CHECK_THAT(lognormal_skewness(1.0), WithinAbs(6.185, 5e-3));
  CHECK_THAT(lognormal_skewness(3.0), WithinAbs(96.48, 0.05));
  // The 23.732 quoted alongside these belongs to sigma^2 = 2.
  CHECK_THAT(lognormal_skewness(2.0), WithinAbs(23.732, 5e-3));
  CHECK_THROWS_AS(lognormal_skewness(0.0), DomainError);
}

TEST_CASE("invalid models are rejected", "[sampling]") {
  CHECK_THROWS_AS(validate_model(NormalModel{0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(validate_model(LognormalModel{0.0, -1.0}), DomainError);
  CHECK_THROWS_AS(validate_model(BinomialModel{0, 0.5}), DomainError);
  CHECK_THROWS_AS(validate_model(BinomialModel{10, 1.5}), DomainError);
  CHECK_THROWS(draw_sample(NormalModel{0.0, 1.0}, 0, SeedSpec{1, {}}));
}

TEST_CASE("large samples match the model mean", "[sampling]") {
  const auto normal = draw_sample(NormalModel{2.0, 1.0}, 1'000'000, SeedSpec{42, {0}});
  CHECK(normal.size() == 1'000'000);
  CHECK_THAT(mean_of(normal), WithinAbs(2.0, 0.01));
  const auto logn = draw_sample(LognormalModel{0.0, 0.2}, 1'000'000, SeedSpec{42, {1}});
  CHECK_THAT(mean_of(logn), WithinAbs(std::exp(0.1), 0.01));
  const auto binom = draw_sample(BinomialModel{10, 0.3}, 200'000, SeedSpec{42, {2}});
  CHECK_THAT(mean_of(binom), WithinAbs(3.0, 0.02));
}

TEST_CASE("binomial draws lie in the support", "[sampling]") {
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto x = draw_sample(BinomialModel{10, 0.5}, 1, SeedSpec{s, {}});
    REQUIRE(x.size() == 1);
    CHECK(x[0] >= 0.0);
    CHECK(x[0] <= 10.0);
    CHECK(x[0] == std::floor(x[0]));
  }
}

TEST_CASE("normal draws pass a Kolmogorov-Smirnov test", "[sampling][property]") {
  auto x = draw_sample(NormalModel{0.0, 1.0}, 100'000, SeedSpec{20240611, {3}});
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = special::normal_cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  // Asymptotic 1% critical value 1.6276 / sqrt(n).
  CHECK(d < 1.6276 / std::sqrt(n));
}

TEST_CASE("streams are deterministic and distinct", "[sampling]") {
  const SeedSpec a{7, {1, 2, 3}};
  CHECK(draw_sample(NormalModel{0, 1}, 20, a) == draw_sample(NormalModel{0, 1}, 20, a));
  CHECK(draw_sample(NormalModel{0, 1}, 20, a) !=
        draw_sample(NormalModel{0, 1}, 20, SeedSpec{7, {1, 2, 4}}));
  CHECK(draw_sample(NormalModel{0, 1}, 20, a) !=
        draw_sample(NormalModel{0, 1}, 20, SeedSpec{8, {1, 2, 3}}));
  CHECK(a.key().value() == StreamKey(7).child(1).child(2).child(3).value());
  CHECK(a.child(9).key().value() == a.key().child(9).value());
}

TEST_CASE("bootstrap resample contract", "[sampling]") {
  const Sample one{3.5};
  CHECK(bootstrap_resample(one, SeedSpec{1, {}}) == Sample{3.5});

  const Sample x{1.0, 2.0, 2.0, 7.0, -4.0, 10.5};
  const std::set<double> support(x.begin(), x.end());
  for (std::uint64_t j = 0; j < 50; ++j) {
    const auto r = bootstrap_resample(x, SeedSpec{99, {0, 0, j}});
    REQUIRE(r.size() == x.size());
    for (double v : r) CHECK(support.count(v) == 1);
  }
  CHECK(bootstrap_resample(x, SeedSpec{5, {1}}) == bootstrap_resample(x, SeedSpec{5, {1}}));
  CHECK_THROWS_AS(bootstrap_resample(Sample{}, SeedSpec{1, {}}), DomainError);
}

TEST_CASE("bounded integers are unbiased enough", "[sampling]") {
  Rng rng(StreamKey(3));
  std::vector<int> counts(6, 0);
  for (int i = 0; i < 60000; ++i) ++counts[rng.below(6)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 400);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
