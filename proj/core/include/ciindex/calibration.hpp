#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ciindex/mean_intervals.hpp"
#include "ciindex/sampling.hpp"
#include "ciindex/types.hpp"

namespace ciindex {

/// Single-level bootstrap calibration of the nominal level.
///
/// For resample j, t*_j = sqrt(n) (theta*_j - theta_hat) / sigma*_j and
/// lambda_j = 1 - Phi(|t*_j|). The calibrated level beta is the ceil(alpha B)-th
/// smallest lambda, floored at 1 / (2B). Intervals are then re-issued with
/// beta in place of alpha.
struct CalibrationOptions {
  /// Empirical coverage of the uncalibrated estimator, when known. If it lies
  /// within skip_delta of 1 - alpha, calibration is bypassed.
  std::optional<double> observed_coverage;
  double skip_delta = 0.005;
};

struct CalibrationResult {
  Probability beta;
  std::vector<double> lambdas;  ///< resample order; empty when skipped
  bool skipped = false;
};

bool calibration_skipped(Probability alpha, const CalibrationOptions& opts);

/// lambda_j for every resample; sd*_j == 0 gives lambda_j = 0.
std::vector<double> calibration_lambdas(const BootstrapReplicates& reps,
                                        std::size_t n);

/// ceil(alpha B)-th order statistic of lambdas, floored at 1 / (2B).
Probability calibrated_level(std::span<const double> lambdas, Probability alpha);

CalibrationResult calibrate_level(std::span<const double> sample,
                                  Probability alpha, std::size_t B,
                                  const SeedSpec& seed,
                                  const CalibrationOptions& opts = {});

/// The kind's interval at the calibrated level. Bootstrap kinds reuse the
/// resamples drawn for calibration (streams seed.child(j)).
ConfidenceInterval calibrated_interval(const MeanEstimatorKind& kind,
                                       std::span<const double> sample,
                                       Probability alpha, std::size_t B,
                                       const SeedSpec& seed,
                                       const CalibrationOptions& opts = {});

}  // namespace ciindex
