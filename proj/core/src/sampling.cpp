#include "ciindex/sampling.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <string>

namespace ciindex {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += kGolden;
  return mix64(state);
}

}  // namespace

StreamKey::StreamKey(std::uint64_t master_seed)
    : state_(mix64(master_seed ^ 0x6A09E667F3BCC909ULL)) {}

StreamKey StreamKey::child(std::uint64_t index) const {
  return StreamKey(mix64(state_ + mix64(index ^ 0xBB67AE8584CAA73BULL) + kGolden),
                   0);
}

StreamKey SeedSpec::key() const {
  StreamKey k(master_seed);
  for (auto idx : stream_path) k = k.child(idx);
  return k;
}

SeedSpec SeedSpec::child(std::uint64_t index) const {
  SeedSpec out = *this;
  out.stream_path.push_back(index);
  return out;
}

Rng::Rng(StreamKey key) {
  std::uint64_t sm = key.value();
  for (auto& word : s_) word = splitmix64(sm);
}

Rng::result_type Rng::operator()() noexcept {
  const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  return result;
}

__extension__ using u128 = unsigned __int128;

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
  u128 m = static_cast<u128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::uniform() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

void validate_model(const DataModel& model) {
  struct Visitor {
    void operator()(const NormalModel& m) const {
      if (!std::isfinite(m.mean)) throw DomainError("normal mean not finite");
      if (!(m.variance > 0.0)) throw DomainError("normal variance must be > 0");
    }
    void operator()(const LognormalModel& m) const {
      if (!std::isfinite(m.mu_log)) throw DomainError("mu_log not finite");
      if (!(m.sigma2_log > 0.0)) {
        throw DomainError("lognormal sigma2_log must be > 0");
      }
    }
    void operator()(const BinomialModel& m) const {
      if (m.trials == 0) throw DomainError("binomial trials must be >= 1");
      if (!(m.p >= 0.0 && m.p <= 1.0)) throw DomainError("binomial p outside [0,1]");
    }
  };
  std::visit(Visitor{}, model);
}

double true_parameter(const DataModel& model) {
  validate_model(model);
  struct Visitor {
    double operator()(const NormalModel& m) const { return m.mean; }
    double operator()(const LognormalModel& m) const {
      return std::exp(m.mu_log + 0.5 * m.sigma2_log);
    }
    double operator()(const BinomialModel& m) const { return m.p; }
  };
  return std::visit(Visitor{}, model);
}

double lognormal_skewness(double sigma2_log) {
  if (!(sigma2_log > 0.0) || !std::isfinite(sigma2_log)) {
    throw DomainError("lognormal_skewness: variance must be positive");
  }
  const double e = std::exp(sigma2_log);
  return (e + 2.0) * std::sqrt(e - 1.0);
}

Sample draw_sample(const DataModel& model, std::size_t n, Rng& rng) {
  validate_model(model);
  if (n == 0) throw DomainError("draw_sample: n must be >= 1");
  Sample out(n);
  struct Visitor {
    Sample& out;
    Rng& rng;
    void operator()(const NormalModel& m) const {
      std::normal_distribution<double> dist(m.mean, std::sqrt(m.variance));
      for (auto& v : out) v = dist(rng);
    }
    void operator()(const LognormalModel& m) const {
      std::lognormal_distribution<double> dist(m.mu_log, std::sqrt(m.sigma2_log));
      for (auto& v : out) v = dist(rng);
    }
    void operator()(const BinomialModel& m) const {
      std::binomial_distribution<std::uint64_t> dist(m.trials, m.p);
      for (auto& v : out) v = static_cast<double>(dist(rng));
    }
  };
  std::visit(Visitor{out, rng}, model);
  return out;
}

Sample draw_sample(const DataModel& model, std::size_t n, const SeedSpec& seed) {
  Rng rng(seed);
  return draw_sample(model, n, rng);
}

Sample bootstrap_resample(std::span<const double> sample, const SeedSpec& seed) {
  if (sample.empty()) throw DomainError("bootstrap_resample: empty sample");
  Rng rng(seed);
  Sample out(sample.size());
  for (auto& v : out) v = sample[rng.below(sample.size())];
  return out;
}

}  // namespace ciindex
