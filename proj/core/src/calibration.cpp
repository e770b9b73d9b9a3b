#include "ciindex/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "ciindex/special_functions.hpp"

namespace ciindex {

bool calibration_skipped(Probability alpha, const CalibrationOptions& opts) {
  return opts.observed_coverage.has_value() &&
         std::fabs(*opts.observed_coverage - (1.0 - alpha.value())) <=
             opts.skip_delta;
}

std::vector<double> calibration_lambdas(const BootstrapReplicates& reps,
                                        std::size_t n) {
  if (reps.sds.size() != reps.means.size()) {
    throw DomainError("calibration needs resample standard deviations");
  }
  const double root_n = std::sqrt(static_cast<double>(n));
  std::vector<double> lambdas(reps.means.size());
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    if (reps.sds[j] == 0.0) {
      lambdas[j] = 0.0;
      continue;
    }
    const double t = root_n * (reps.means[j] - reps.theta_hat) / reps.sds[j];
    // 1 - Phi(|t|) == Phi(-|t|), evaluated without cancellation.
    lambdas[j] = special::normal_cdf(-std::fabs(t));
  }
  return lambdas;
}

Probability calibrated_level(std::span<const double> lambdas, Probability alpha) {
  if (lambdas.empty()) throw DomainError("calibrated_level: no resamples");
  std::vector<double> sorted(lambdas.begin(), lambdas.end());
  std::sort(sorted.begin(), sorted.end());
  const double floor = 1.0 / (2.0 * static_cast<double>(sorted.size()));
  return Probability(std::max(empirical_quantile(sorted, alpha.value()), floor));
}

CalibrationResult calibrate_level(std::span<const double> sample,
                                  Probability alpha, std::size_t B,
                                  const SeedSpec& seed,
                                  const CalibrationOptions& opts) {
  if (sample.size() < 2) throw InsufficientData("calibration needs n >= 2");
  if (B < 2) throw DomainError("calibration needs B >= 2");
  if (calibration_skipped(alpha, opts)) return {alpha, {}, true};
  const auto reps = bootstrap_replicates(sample, B, seed.key(), true);
  auto lambdas = calibration_lambdas(reps, sample.size());
  const auto beta = calibrated_level(lambdas, alpha);
  return {beta, std::move(lambdas), false};
}

ConfidenceInterval calibrated_interval(const MeanEstimatorKind& kind,
                                       std::span<const double> sample,
                                       Probability alpha, std::size_t B,
                                       const SeedSpec& seed,
                                       const CalibrationOptions& opts) {
  const auto cal = calibrate_level(sample, alpha, B, seed, opts);
  const MeanEstimatorKind at_level{kind.method, B};
  return mean_interval(at_level, sample, cal.beta, seed);
}

}  // namespace ciindex
