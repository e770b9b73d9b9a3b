#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ciindex/sampling.hpp"
#include "ciindex/types.hpp"

namespace ciindex {

enum class MeanMethod { normal_theory, johnson_t, bootstrap_percentile, bca };

inline constexpr MeanMethod kAllMeanMethods[] = {
    MeanMethod::normal_theory, MeanMethod::johnson_t,
    MeanMethod::bootstrap_percentile, MeanMethod::bca};

std::string_view to_string(MeanMethod method);
std::optional<MeanMethod> parse_mean_method(std::string_view name);

struct MeanEstimatorKind {
  MeanMethod method = MeanMethod::normal_theory;
  /// Resamples per interval; ignored by the two analytic methods.
  std::size_t bootstrap_B = 0;

  bool is_bootstrap() const noexcept {
    return method == MeanMethod::bootstrap_percentile ||
           method == MeanMethod::bca;
  }
};

/// Moments of a sample computed from deviations about x[0], so a constant
/// sample yields an exact mean and exactly zero spread.
struct SampleMoments {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  ///< n-1 denominator
  double m2 = 0.0;  ///< central moments with 1/n
  double m3 = 0.0;

  /// m3 / m2^{3/2}; zero when m2 == 0.
  double skewness() const noexcept;
};

SampleMoments describe(std::span<const double> sample);

/// xbar +/- z_{1-alpha/2} s / sqrt(n). Requires n >= 2.
ConfidenceInterval normal_theory_interval(std::span<const double> sample,
                                          Probability alpha);

/// Skewness-shifted t interval:
///   center = xbar + k3 / (6 sqrt(n)) * (1 + 2 t^2) * s / sqrt(n),  half = t s / sqrt(n),
/// with t = t_{1-alpha/2, n-1} and k3 the moment skewness m3 / m2^{3/2}.
/// Requires n >= 3.
ConfidenceInterval johnson_t_interval(std::span<const double> sample,
                                      Probability alpha);

/// Percentile interval from B resample means; resample j uses stream
/// seed.child(j). Requires n >= 2, B >= 2.
ConfidenceInterval bootstrap_percentile_interval(std::span<const double> sample,
                                                 Probability alpha,
                                                 std::size_t B,
                                                 const SeedSpec& seed);

/// Bias-corrected and accelerated interval with jackknife acceleration.
/// Requires n >= 3, B >= 2.
ConfidenceInterval bca_interval(std::span<const double> sample,
                                Probability alpha, std::size_t B,
                                const SeedSpec& seed);

/// Analytic or bootstrap interval dispatched on kind.
ConfidenceInterval mean_interval(const MeanEstimatorKind& kind,
                                 std::span<const double> sample,
                                 Probability alpha, const SeedSpec& seed);

// Building blocks shared with calibration and the simulation harness.

/// Resample statistics for one sample, in resample order. sds is left empty
/// unless requested.
struct BootstrapReplicates {
  double theta_hat = 0.0;
  std::vector<double> means;
  std::vector<double> sds;
};

/// Draws B resamples (resample j from key.child(j)) and records each
/// resample's mean and, when with_sd, its n-1 standard deviation.
BootstrapReplicates bootstrap_replicates(std::span<const double> sample,
                                         std::size_t B, const StreamKey& key,
                                         bool with_sd);

/// Order statistic number ceil(p * B) (1-based, clamped to [1, B]) of a
/// sorted range.
double empirical_quantile(std::span<const double> sorted, double p);

ConfidenceInterval percentile_from_sorted(std::span<const double> sorted_means,
                                          Probability alpha);

/// Jackknife acceleration of the mean; 0 when the denominator vanishes.
double jackknife_acceleration(std::span<const double> sample);

/// Bias correction z0 = Phi^{-1}(#{theta* < theta_hat} / B) with counts 0 and
/// B replaced by 0.5 and B - 0.5.
double bias_correction(std::span<const double> sorted_means, double theta_hat);

/// Adjusted percentile level Phi(z0 + (z0 + z) / (1 - a (z0 + z))).
double bca_level(double z0, double acceleration, double z);

ConfidenceInterval bca_from_sorted(std::span<const double> sorted_means,
                                   double theta_hat, double acceleration,
                                   Probability alpha);

}  // namespace ciindex
