#include "ciindex/mean_intervals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ciindex/special_functions.hpp"

namespace ciindex {
namespace {

void require_alpha(Probability alpha) {
  if (!(alpha.value() > 0.0 && alpha.value() < 1.0)) {
    throw DomainError("alpha must lie in (0,1)");
  }
}

void require_size(std::span<const double> sample, std::size_t min_n,
                  const char* who) {
  if (sample.size() < min_n) {
    throw InsufficientData(std::string(who) + " needs at least " +
                           std::to_string(min_n) + " observations, got " +
                           std::to_string(sample.size()));
  }
}

void require_resamples(std::size_t B) {
  if (B < 2) throw DomainError("bootstrap needs B >= 2 resamples");
}

}  // namespace

std::string_view to_string(MeanMethod method) {
  switch (method) {
    case MeanMethod::normal_theory: return "normal_theory";
    case MeanMethod::johnson_t: return "johnson_t";
    case MeanMethod::bootstrap_percentile: return "bootstrap_percentile";
    case MeanMethod::bca: return "bca";
  }
  return "unknown";
}

std::optional<MeanMethod> parse_mean_method(std::string_view name) {
  for (auto m : kAllMeanMethods) {
    if (to_string(m) == name) return m;
  }
  if (name == "percentile") return MeanMethod::bootstrap_percentile;
  return std::nullopt;
}

double SampleMoments::skewness() const noexcept {
  if (m2 <= 0.0) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

SampleMoments describe(std::span<const double> sample) {
  SampleMoments m;
  m.n = sample.size();
  if (m.n == 0) return m;
  const double origin = sample[0];
  double shift = 0.0;
  for (double x : sample) shift += x - origin;
  const auto n = static_cast<double>(m.n);
  m.mean = origin + shift / n;
  double s2 = 0.0;
  double s3 = 0.0;
  for (double x : sample) {
    const double d = x - m.mean;
    s2 += d * d;
    s3 += d * d * d;
  }
  m.m2 = s2 / n;
  m.m3 = s3 / n;
  m.sd = m.n > 1 ? std::sqrt(s2 / (n - 1.0)) : 0.0;
  return m;
}

ConfidenceInterval normal_theory_interval(std::span<const double> sample,
                                          Probability alpha) {
  require_alpha(alpha);
  require_size(sample, 2, "normal theory interval");
  const auto mom = describe(sample);
  const double z = special::normal_quantile(1.0 - 0.5 * alpha.value());
  const double half = z * mom.sd / std::sqrt(static_cast<double>(mom.n));
  return {mom.mean - half, mom.mean + half};
}

ConfidenceInterval johnson_t_interval(std::span<const double> sample,
                                      Probability alpha) {
  require_alpha(alpha);
  require_size(sample, 3, "Johnson t interval");
  const auto mom = describe(sample);
  if (mom.m2 == 0.0) return {mom.mean, mom.mean};
  const double n = static_cast<double>(mom.n);
  const double t = special::student_t_quantile(1.0 - 0.5 * alpha.value(), n - 1.0);
  const double se = mom.sd / std::sqrt(n);
  // The skewness shift is in standard-error units, like t itself.
  const double shift = mom.skewness() / (6.0 * std::sqrt(n)) * (1.0 + 2.0 * t * t);
  const double center = mom.mean + shift * se;
  const double half = t * se;
  return {center - half, center + half};
}

BootstrapReplicates bootstrap_replicates(std::span<const double> sample,
                                         std::size_t B, const StreamKey& key,
                                         bool with_sd) {
  const std::size_t n = sample.size();
  if (n == 0) throw DomainError("bootstrap_replicates: empty sample");
  const auto mom = describe(sample);
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = sample[i] - mom.mean;

  BootstrapReplicates out;
  out.theta_hat = mom.mean;
  out.means.resize(B);
  if (with_sd) out.sds.resize(B);
  const double nd = static_cast<double>(n);
  for (std::size_t j = 0; j < B; ++j) {
    Rng rng(key.child(j));
    double s1 = 0.0;
    if (with_sd) {
      double s2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = dev[rng.below(n)];
        s1 += d;
        s2 += d * d;
      }
      const double var = n > 1 ? (s2 - s1 * s1 / nd) / (nd - 1.0) : 0.0;
      // A resample of one repeated value leaves only rounding noise.
      const bool degenerate = var <= 1e-20 * mom.m2;
      out.sds[j] = degenerate ? 0.0 : std::sqrt(var);
    } else {
      for (std::size_t i = 0; i < n; ++i) s1 += dev[rng.below(n)];
    }
    out.means[j] = mom.mean + s1 / nd;
  }
  return out;
}

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("empirical_quantile: empty range");
  const auto B = static_cast<double>(sorted.size());
  // The small offset keeps products such as 0.975 * 200 from rounding up.
  double k = std::ceil(p * B - 1e-9);
  k = std::clamp(k, 1.0, B);
  return sorted[static_cast<std::size_t>(k) - 1];
}

ConfidenceInterval percentile_from_sorted(std::span<const double> sorted_means,
                                          Probability alpha) {
  require_alpha(alpha);
  return {empirical_quantile(sorted_means, 0.5 * alpha.value()),
          empirical_quantile(sorted_means, 1.0 - 0.5 * alpha.value())};
}

double jackknife_acceleration(std::span<const double> sample) {
  // Leave-one-out means are theta_hat - d_i / (n - 1); the scale factor
  // cancels in the ratio.
  const auto mom = describe(sample);
  double num = 0.0;
  double den = 0.0;
  for (double x : sample) {
    const double u = x - mom.mean;
    num += u * u * u;
    den += u * u;
  }
  if (den <= 0.0) return 0.0;
  const double a = num / (6.0 * std::pow(den, 1.5));
  return std::isfinite(a) ? a : 0.0;
}

double bias_correction(std::span<const double> sorted_means, double theta_hat) {
  const auto B = static_cast<double>(sorted_means.size());
  auto below = static_cast<double>(
      std::lower_bound(sorted_means.begin(), sorted_means.end(), theta_hat) -
      sorted_means.begin());
  if (below == 0.0) below = 0.5;
  if (below == B) below = B - 0.5;
  return special::normal_quantile(below / B);
}

double bca_level(double z0, double acceleration, double z) {
  const double w = z0 + z;
  const double denom = 1.0 - acceleration * w;
  if (denom <= 0.0) return w > 0.0 ? 1.0 : 0.0;
  const double arg = z0 + w / denom;
  if (!std::isfinite(arg)) return arg > 0.0 ? 1.0 : 0.0;
  return special::normal_cdf(arg);
}

ConfidenceInterval bca_from_sorted(std::span<const double> sorted_means,
                                   double theta_hat, double acceleration,
                                   Probability alpha) {
  require_alpha(alpha);
  const double z0 = bias_correction(sorted_means, theta_hat);
  const double z_lo = special::normal_quantile(0.5 * alpha.value());
  const double z_hi = -z_lo;
  const double a1 = bca_level(z0, acceleration, z_lo);
  const double a2 = bca_level(z0, acceleration, z_hi);
  return {empirical_quantile(sorted_means, a1),
          empirical_quantile(sorted_means, a2)};
}

ConfidenceInterval bootstrap_percentile_interval(std::span<const double> sample,
                                                 Probability alpha,
                                                 std::size_t B,
                                                 const SeedSpec& seed) {
  require_alpha(alpha);
  require_size(sample, 2, "bootstrap percentile interval");
  require_resamples(B);
  auto reps = bootstrap_replicates(sample, B, seed.key(), false);
  std::sort(reps.means.begin(), reps.means.end());
  return percentile_from_sorted(reps.means, alpha);
}

ConfidenceInterval bca_interval(std::span<const double> sample,
                                Probability alpha, std::size_t B,
                                const SeedSpec& seed) {
  require_alpha(alpha);
  require_size(sample, 3, "BCa interval");
  require_resamples(B);
  auto reps = bootstrap_replicates(sample, B, seed.key(), false);
  std::sort(reps.means.begin(), reps.means.end());
  return bca_from_sorted(reps.means, reps.theta_hat,
                         jackknife_acceleration(sample), alpha);
}

ConfidenceInterval mean_interval(const MeanEstimatorKind& kind,
                                 std::span<const double> sample,
                                 Probability alpha, const SeedSpec& seed) {
  switch (kind.method) {
    case MeanMethod::normal_theory: return normal_theory_interval(sample, alpha);
    case MeanMethod::johnson_t: return johnson_t_interval(sample, alpha);
    case MeanMethod::bootstrap_percentile:
      return bootstrap_percentile_interval(sample, alpha, kind.bootstrap_B, seed);
    case MeanMethod::bca:
      return bca_interval(sample, alpha, kind.bootstrap_B, seed);
  }
  throw DomainError("unknown mean method");
}

}  // namespace ciindex
