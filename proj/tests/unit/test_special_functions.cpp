#include <catch_amalgamated.hpp>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "ciindex/special_functions.hpp"

using namespace ciindex;
using namespace ciindex::special;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<double> random_probabilities(std::size_t count, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  std::vector<double> ps(count);
  for (auto& p : ps) p = u(gen);
  return ps;
}

const std::vector<Distribution>& sample_distributions() {
  static const std::vector<Distribution> dists = {
      Normal{},          StudentT{1},        StudentT{4},    StudentT{29},
      StudentT{999},     ChiSquare{1},       ChiSquare{2},   ChiSquare{7.5},
      ChiSquare{200},    Beta{1, 11},        Beta{0.5, 0.5}, Beta{2.5, 9.5},
      Beta{30, 71},      Beta{10.5, 0.5},
  };
  return dists;
}

}  // namespace

TEST_CASE("normal cdf reference values", "[special]") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK_THAT(normal_cdf(1.959964), WithinAbs(0.975, 1e-6));
  CHECK_THAT(normal_cdf(-1.959964), WithinAbs(0.025, 1e-6));
  CHECK_THROWS_AS(normal_cdf(std::numeric_limits<double>::quiet_NaN()), DomainError);
  CHECK_THROWS_AS(normal_cdf(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("normal cdf matches boost to 1e-12", "[special][oracle]") {
  const boost::math::normal_distribution<double> nd;
  for (double x = -38.0; x <= 9.0; x += 0.037) {
    INFO("x = " << x);
    CHECK_THAT(normal_cdf(x), WithinAbs(boost::math::cdf(nd, x), 1e-12));
  }
}

TEST_CASE("quantile reference values", "[special]") {
  CHECK_THAT(quantile({Normal{}, Probability(0.975)}), WithinAbs(1.959964, 1e-6));
  CHECK_THAT(quantile({StudentT{4}, Probability(0.975)}), WithinAbs(2.776445, 1e-5));
  CHECK_THAT(quantile({Beta{1, 11}, Probability(0.975)}),
             WithinAbs(1.0 - std::pow(0.025, 1.0 / 11.0), 1e-9));
}

TEST_CASE("quantiles agree with boost", "[special][oracle]") {
  namespace bm = boost::math;
  for (double p : random_probabilities(200, 11)) {
    INFO("p = " << p);
    CHECK_THAT(normal_quantile(p), WithinAbs(bm::quantile(bm::normal_distribution<>(), p), 1e-10));
    for (double df : {1.0, 3.0, 9.0, 49.0, 499.0}) {
      CHECK_THAT(student_t_quantile(p, df),
                 WithinAbs(bm::quantile(bm::students_t_distribution<>(df), p), 1e-8));
    }
    for (double df : {1.0, 2.0, 20.0, 202.0}) {
      const double ref = bm::quantile(bm::chi_squared_distribution<>(df), p);
      CHECK_THAT(chi_square_quantile(p, df), WithinAbs(ref, 1e-8 * std::max(1.0, ref)));
    }
    for (auto [a, b] : {std::pair{0.5, 10.5}, {3.0, 8.0}, {20.0, 81.0}, {9.5, 1.5}}) {
      CHECK_THAT(beta_quantile(p, a, b),
                 WithinAbs(bm::quantile(bm::beta_distribution<>(a, b), p), 1e-9));
    }
  }
}

TEST_CASE("cdf functions agree with boost", "[special][oracle]") {
  namespace bm = boost::math;
  for (double t = -12.0; t <= 12.0; t += 0.25) {
    for (double df : {1.0, 4.0, 30.0}) {
      CHECK_THAT(student_t_cdf(t, df),
                 WithinAbs(bm::cdf(bm::students_t_distribution<>(df), t), 1e-12));
    }
  }
  for (double x = 0.0; x <= 60.0; x += 0.5) {
    for (double df : {1.0, 5.0, 40.0}) {
      CHECK_THAT(chi_square_cdf(x, df),
                 WithinAbs(bm::cdf(bm::chi_squared_distribution<>(df), x), 1e-12));
    }
  }
  for (double x = 0.0; x <= 1.0; x += 0.01) {
    for (auto [a, b] : {std::pair{0.5, 0.5}, {2.0, 7.0}, {40.0, 61.0}}) {
      CHECK_THAT(beta_cdf(x, a, b), WithinAbs(bm::cdf(bm::beta_distribution<>(a, b), x), 1e-12));
    }
  }
}

TEST_CASE("quantile round-trips through cdf within 1e-9", "[special][property]") {
  const auto ps = random_probabilities(1000, 2024);
  for (const auto& dist : sample_distributions()) {
    double worst = 0.0;
    for (double p : ps) {
      const double q = quantile({dist, Probability(p)});
      worst = std::max(worst, std::fabs(cdf(dist, q) - p));
    }
    INFO("distribution index " << dist.index() << ", worst error " << worst);
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("quantile is strictly increasing in p", "[special][property]") {
  for (const auto& dist : sample_distributions()) {
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < 1000; ++i) {
      const double q = quantile({dist, Probability(i / 1000.0)});
      INFO("distribution index " << dist.index() << ", p = " << i / 1000.0);
      REQUIRE(q > prev);
      prev = q;
    }
  }
}

TEST_CASE("normal quantile is antisymmetric", "[special][property]") {
  for (double p : random_probabilities(1000, 7)) {
    CHECK_THAT(normal_quantile(p), WithinAbs(-normal_quantile(1.0 - p), 1e-12));
  }
}

TEST_CASE("quantile boundary conventions", "[special]") {
  CHECK(chi_square_quantile(0.3, 0.0) == 0.0);
  CHECK(beta_quantile(0.025, 0.0, 11.0) == 0.0);
  CHECK(beta_quantile(0.975, 10.0, 0.0) == 1.0);
  CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
  CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
  CHECK_THROWS_AS(student_t_quantile(0.5, 0.0), DomainError);
  CHECK_THROWS_AS(beta_quantile(0.5, -1.0, 2.0), DomainError);
  CHECK_THROWS_AS(Probability(1.5), DomainError);
}
