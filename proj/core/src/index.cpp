#include "ciindex/index.hpp"

#include <cmath>
#include <string>

namespace ciindex {

std::string_view to_string(LossKind loss) {
  return loss == LossKind::absolute ? "absolute" : "squared";
}

std::optional<LossKind> parse_loss(std::string_view name) {
  if (name == "absolute") return LossKind::absolute;
  if (name == "squared") return LossKind::squared;
  return std::nullopt;
}

void IndexConfig::validate() const {
  if (!(alpha.value() > 0.0 && alpha.value() < 1.0)) {
    throw DomainError("index alpha must lie in (0,1)");
  }
}

double k_alpha(Probability alpha) {
  const double a = alpha.value();
  if (!(a > 0.0 && a < 1.0)) throw DomainError("k_alpha: alpha must lie in (0,1)");
  return (4.0 - 2.0 * a) / (3.0 - 2.0 * a);
}

double loss_value(LossKind loss, double coverage, Probability alpha) {
  const double dev = 1.0 - alpha.value() - coverage;
  return loss == LossKind::absolute ? std::fabs(dev) : dev * dev;
}

double compute_index(const IntervalPerformance& perf, const IndexConfig& cfg) {
  cfg.validate();
  perf.validate();
  const double eta = perf.coverage;
  const double h = loss_value(cfg.loss, eta, cfg.alpha);
  const double raw =
      k_alpha(cfg.alpha) *
      (1.0 - 0.5 * (1.0 + h) / (1.0 + eta / (1.0 + perf.mean_length)));
  if (!cfg.rescaled) return raw;
  // No range check here: under squared loss, coverage above nominal pushes
  // the raw index past 1, and that is still a valid index value.
  const auto [lo, hi] = index_range(cfg);
  return (raw - lo) / (hi - lo);
}

std::pair<double, double> index_range(const IndexConfig& cfg) {
  cfg.validate();
  const double a = cfg.alpha.value();
  if (cfg.loss == LossKind::absolute) return {0.5 * k_alpha(cfg.alpha) * a, 1.0};
  return {a * (2.0 - a) * (2.0 - a) / (3.0 - 2.0 * a), 1.0};
}

double rescale_index(double value, const IndexConfig& cfg) {
  const auto [lo, hi] = index_range(cfg);
  constexpr double slack = 1e-9;
  if (!(value >= lo - slack && value <= hi + slack)) {
    throw DomainError("rescale_index: value " + std::to_string(value) +
                      " outside the index range");
  }
  return (value - lo) / (hi - lo);
}

double limit_case(LimitCase which, const IndexConfig& cfg) {
  cfg.validate();
  const double a = cfg.alpha.value();
  const double k = k_alpha(cfg.alpha);
  switch (which) {
    case LimitCase::I:
    case LimitCase::II:
      return cfg.loss == LossKind::absolute ? 0.5 * k * a
                                            : 0.5 * k * a * (2.0 - a);
    case LimitCase::III: return 0.5 * k;
    case LimitCase::IV: return 1.0;
  }
  throw DomainError("unknown limit case");
}

}  // namespace ciindex
