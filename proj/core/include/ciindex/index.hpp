#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "ciindex/types.hpp"

/// The confidence-interval index
///
///   I(L, eta; alpha) = k_alpha * (1 - (1 + H(eta; alpha)) / (2 (1 + eta / (1 + L))))
///
/// with k_alpha = (4 - 2 alpha) / (3 - 2 alpha). H penalises departures of the
/// coverage eta from the nominal 1 - alpha, either as |1 - alpha - eta| or
/// (1 - alpha - eta)^2. Larger values are better; 1 is attained only at
/// L = 0 with eta = 1 - alpha.
namespace ciindex {

enum class LossKind { absolute, squared };

std::string_view to_string(LossKind loss);
std::optional<LossKind> parse_loss(std::string_view name);

struct IndexConfig {
  Probability alpha{0.05};
  LossKind loss = LossKind::absolute;
  bool rescaled = false;

  /// Throws DomainError unless 0 < alpha < 1.
  void validate() const;
};

enum class LimitCase { I, II, III, IV };

double k_alpha(Probability alpha);

double loss_value(LossKind loss, double coverage, Probability alpha);

/// Raw index, or its affine rescale to [0,1] when cfg.rescaled.
double compute_index(const IntervalPerformance& perf, const IndexConfig& cfg);

/// (lower, upper) of the raw index for the configured loss. Valid as the
/// attainable range for alpha <= 0.5.
std::pair<double, double> index_range(const IndexConfig& cfg);

/// Affine map sending index_range(cfg).first to 0 and 1 to 1. Inputs outside
/// the range by more than 1e-9 throw DomainError.
double rescale_index(double value, const IndexConfig& cfg);

/// Limit of the raw index at the four corners of the (L, eta) domain:
/// I: L -> 0, eta -> 0; II: L -> inf, eta -> 0; III: L -> inf,
/// eta -> 1 - alpha; IV: L -> 0, eta -> 1 - alpha.
double limit_case(LimitCase which, const IndexConfig& cfg);

}  // namespace ciindex
