#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "ciindex/types.hpp"

namespace ciindex {

using Sample = std::vector<double>;

/// Hash-chained stream identifier. Deriving a child from a key is pure, so a
/// given path always names the same stream regardless of scheduling.
class StreamKey {
 public:
  explicit StreamKey(std::uint64_t master_seed);

  StreamKey child(std::uint64_t index) const;
  std::uint64_t value() const noexcept { return state_; }

 private:
  explicit StreamKey(std::uint64_t state, int) : state_(state) {}
  std::uint64_t state_;
};

/// Master seed plus a path such as (replication, sample, bootstrap).
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> stream_path;

  StreamKey key() const;
  SeedSpec child(std::uint64_t index) const;
};

/// xoshiro256++ seeded from a StreamKey through splitmix64.
/// Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(StreamKey key);
  explicit Rng(const SeedSpec& seed) : Rng(seed.key()) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept;

  /// Uniform integer in [0, bound), bound > 0 (Lemire's nearly divisionless
  /// method).
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

 private:
  std::uint64_t s_[4];
};

struct NormalModel {
  double mean;
  double variance;
};
/// Parameters of the underlying normal: X = exp(Y), Y ~ N(mu_log, sigma2_log).
struct LognormalModel {
  double mu_log;
  double sigma2_log;
};
struct BinomialModel {
  std::uint64_t trials;
  double p;
};

using DataModel = std::variant<NormalModel, LognormalModel, BinomialModel>;

/// Throws DomainError when a variance is non-positive, p lies outside [0,1]
/// or trials is zero.
void validate_model(const DataModel& model);

/// The population quantity the intervals target: the mean for normal and
/// lognormal models, p for the binomial model.
double true_parameter(const DataModel& model);

/// Skewness of a lognormal whose log has variance sigma2_log.
double lognormal_skewness(double sigma2_log);

Sample draw_sample(const DataModel& model, std::size_t n, const SeedSpec& seed);
Sample draw_sample(const DataModel& model, std::size_t n, Rng& rng);

/// One nonparametric bootstrap resample (n draws with replacement).
Sample bootstrap_resample(std::span<const double> sample, const SeedSpec& seed);

}  // namespace ciindex
