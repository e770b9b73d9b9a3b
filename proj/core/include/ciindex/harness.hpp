#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ciindex/index.hpp"
#include "ciindex/mean_intervals.hpp"
#include "ciindex/proportion_intervals.hpp"
#include "ciindex/sampling.hpp"
#include "ciindex/types.hpp"

namespace ciindex {

/// Invalid simulation plan.
class PlanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using EstimatorKind = std::variant<MeanMethod, ProportionMethod>;

std::string estimator_name(const EstimatorKind& kind);

/// One scenario of the Monte Carlo study.
///
/// Mean studies: each of R replications draws N samples of size n; every
/// estimator builds one interval per sample (bootstrap kinds from B shared
/// resamples) and the replication records coverage and mean length over the
/// N samples. Proportion studies draw R binomial counts and pool them into a
/// single coverage/length pair per estimator.
struct SimulationPlan {
  DataModel model = NormalModel{0.0, 1.0};
  std::size_t n = 10;
  std::size_t N = 500;
  std::size_t B = 200;
  std::size_t R = 50;
  IndexConfig index;
  std::vector<EstimatorKind> estimators;
  std::uint64_t master_seed = 0;
  bool calibrate = false;
  double skip_delta = 0.005;
  unsigned workers = 1;

  Probability alpha() const noexcept { return index.alpha; }
  bool is_mean_study() const noexcept {
    return !std::holds_alternative<BinomialModel>(model);
  }
  /// Throws PlanError describing the first violated constraint.
  void validate() const;
};

struct ReplicationResult {
  EstimatorKind estimator;
  double coverage = 0.0;
  double mean_length = 0.0;
  double index = 0.0;
};

/// Shape statistics of R index values. skewness (g1) and excess kurtosis
/// (g2) are absent when the values have zero variance.
struct IndexSummary {
  double mean = 0.0;
  std::optional<double> skewness;
  std::optional<double> kurtosis;
  double st_dev = 0.0;
};

/// Requires at least three values; the result does not depend on their order.
IndexSummary summarize_index(std::span<const double> values);

struct MeanEstimatorStudy {
  MeanMethod method;
  std::vector<ReplicationResult> replications;
  std::optional<IndexSummary> summary;  ///< present when R >= 3
  IntervalPerformance pooled;           ///< averages over all R x N samples
  double pooled_index = 0.0;
  /// Calibrated runs only: true when the pooled uncalibrated coverage was
  /// within skip_delta of nominal and the uncalibrated results were kept.
  bool calibration_skipped = false;
};

struct MeanStudyResult {
  std::vector<MeanEstimatorStudy> uncalibrated;
  std::vector<MeanEstimatorStudy> calibrated;  ///< empty unless plan.calibrate
  double mean_beta = 0.0;                      ///< average calibrated level
};

MeanStudyResult run_mean_study(const SimulationPlan& plan);

struct ProportionEstimatorStudy {
  ProportionMethod method;
  ReplicationResult result;
  IntervalPerformance exact;  ///< pmf-summed oracle for the same (n, p)
};

std::vector<ProportionEstimatorStudy> run_proportion_study(
    const SimulationPlan& plan);

}  // namespace ciindex
