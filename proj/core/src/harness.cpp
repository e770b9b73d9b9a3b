#include "ciindex/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "ciindex/calibration.hpp"

namespace ciindex {
namespace {

// Runs body(r) for r in [0, count) on up to `workers` threads. Each index is
// processed exactly once; results must be written to per-index slots.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t r = 0; r < count; ++r) body(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < count; r = next++) {
          try {
            body(r);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

struct Tally {
  std::size_t covered = 0;
  double length_sum = 0.0;

  void add(const ConfidenceInterval& ci, double theta) {
    covered += ci.contains(theta) ? 1 : 0;
    length_sum += ci.length();
  }
  IntervalPerformance performance(std::size_t count) const {
    const auto c = static_cast<double>(count);
    return {static_cast<double>(covered) / c, length_sum / c};
  }
};

struct ReplicationTallies {
  std::vector<Tally> plain;
  std::vector<Tally> calibrated;
  double beta_sum = 0.0;
};

std::size_t min_sample_size(MeanMethod m) {
  return (m == MeanMethod::johnson_t || m == MeanMethod::bca) ? 3 : 2;
}

ReplicationTallies run_mean_replication(const SimulationPlan& plan,
                                        std::span<const MeanMethod> methods,
                                        std::size_t r) {
  const double theta = true_parameter(plan.model);
  const Probability alpha = plan.alpha();
  const bool need_boot =
      plan.calibrate ||
      std::any_of(methods.begin(), methods.end(), [](MeanMethod m) {
        return m == MeanMethod::bootstrap_percentile || m == MeanMethod::bca;
      });
  const bool need_bca =
      std::find(methods.begin(), methods.end(), MeanMethod::bca) != methods.end();

  ReplicationTallies out;
  out.plain.resize(methods.size());
  if (plan.calibrate) out.calibrated.resize(methods.size());

  const StreamKey rep_key = StreamKey(plan.master_seed).child(r);
  std::vector<double> sorted;
  for (std::size_t i = 0; i < plan.N; ++i) {
    const StreamKey sample_key = rep_key.child(i);
    Rng rng(sample_key);
    const Sample sample = draw_sample(plan.model, plan.n, rng);

    BootstrapReplicates reps;
    double accel = 0.0;
    if (need_boot) {
      // Resample j of sample i draws from sample_key.child(j), matching
      // bootstrap_resample(sample, {seed, {r, i, j}}).
      reps = bootstrap_replicates(sample, plan.B, sample_key, plan.calibrate);
      sorted = reps.means;
      std::sort(sorted.begin(), sorted.end());
      if (need_bca) accel = jackknife_acceleration(sample);
    }

    auto interval_at = [&](MeanMethod m, Probability level) -> ConfidenceInterval {
      switch (m) {
        case MeanMethod::normal_theory: return normal_theory_interval(sample, level);
        case MeanMethod::johnson_t: return johnson_t_interval(sample, level);
        case MeanMethod::bootstrap_percentile:
          return percentile_from_sorted(sorted, level);
        case MeanMethod::bca:
          return bca_from_sorted(sorted, reps.theta_hat, accel, level);
      }
      throw DomainError("unknown mean method");
    };

    for (std::size_t e = 0; e < methods.size(); ++e) {
      out.plain[e].add(interval_at(methods[e], alpha), theta);
    }
    if (plan.calibrate) {
      const auto lambdas = calibration_lambdas(reps, sample.size());
      const Probability beta = calibrated_level(lambdas, alpha);
      out.beta_sum += beta.value();
      for (std::size_t e = 0; e < methods.size(); ++e) {
        out.calibrated[e].add(interval_at(methods[e], beta), theta);
      }
    }
  }
  return out;
}

MeanEstimatorStudy assemble(const SimulationPlan& plan, MeanMethod method,
                            const std::vector<IntervalPerformance>& per_rep) {
  MeanEstimatorStudy study{method, {}, std::nullopt, {}, 0.0, false};
  const auto cfg = plan.index;
  std::vector<double> indexes;
  indexes.reserve(per_rep.size());
  for (const auto& perf : per_rep) {
    const double idx = compute_index(perf, cfg);
    study.replications.push_back({method, perf.coverage, perf.mean_length, idx});
    indexes.push_back(idx);
    study.pooled.coverage += perf.coverage;
    study.pooled.mean_length += perf.mean_length;
  }
  const auto R = static_cast<double>(per_rep.size());
  study.pooled.coverage /= R;
  study.pooled.mean_length /= R;
  study.pooled_index = compute_index(study.pooled, cfg);
  if (indexes.size() >= 3) study.summary = summarize_index(indexes);
  return study;
}

}  // namespace

std::string estimator_name(const EstimatorKind& kind) {
  return std::visit([](auto m) { return std::string(to_string(m)); }, kind);
}

void SimulationPlan::validate() const {
  try {
    validate_model(model);
    index.validate();
  } catch (const DomainError& e) {
    throw PlanError(e.what());
  }
  if (n == 0 || N == 0 || R == 0) throw PlanError("n, N and R must be >= 1");
  if (estimators.empty()) throw PlanError("estimator list is empty");
  if (workers == 0) throw PlanError("workers must be >= 1");
  if (!(skip_delta >= 0.0)) throw PlanError("skip_delta must be >= 0");
  if (is_mean_study()) {
    bool bootstrap = calibrate;
    for (const auto& e : estimators) {
      const auto* m = std::get_if<MeanMethod>(&e);
      if (!m) throw PlanError("proportion estimator in a mean study");
      if (n < min_sample_size(*m)) {
        throw PlanError(estimator_name(e) + " needs n >= " +
                        std::to_string(min_sample_size(*m)));
      }
      bootstrap = bootstrap || *m == MeanMethod::bootstrap_percentile ||
                  *m == MeanMethod::bca;
    }
    if (bootstrap && B < 2) throw PlanError("bootstrap methods need B >= 2");
  } else {
    if (calibrate) throw PlanError("calibration applies to mean studies only");
    for (const auto& e : estimators) {
      if (!std::holds_alternative<ProportionMethod>(e)) {
        throw PlanError("mean estimator in a proportion study");
      }
    }
    if (std::get<BinomialModel>(model).trials != n) {
      throw PlanError("n must equal the binomial number of trials");
    }
  }
}

IndexSummary summarize_index(std::span<const double> values) {
  if (values.size() < 3) {
    throw InsufficientData("summarize_index needs at least 3 values");
  }
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const auto mom = describe(v);
  double m4 = 0.0;
  for (double x : v) {
    const double d = x - mom.mean;
    m4 += d * d * d * d;
  }
  m4 /= static_cast<double>(v.size());
  IndexSummary s;
  s.mean = mom.mean;
  s.st_dev = mom.sd;
  if (mom.m2 > 0.0) {
    s.skewness = mom.m3 / std::pow(mom.m2, 1.5);
    s.kurtosis = m4 / (mom.m2 * mom.m2) - 3.0;
  }
  return s;
}

MeanStudyResult run_mean_study(const SimulationPlan& plan) {
  plan.validate();
  if (!plan.is_mean_study()) throw PlanError("run_mean_study needs a normal or lognormal model");
  std::vector<MeanMethod> methods;
  for (const auto& e : plan.estimators) methods.push_back(std::get<MeanMethod>(e));

  std::vector<ReplicationTallies> tallies(plan.R);
  parallel_for(plan.R, plan.workers, [&](std::size_t r) {
    tallies[r] = run_mean_replication(plan, methods, r);
  });

  MeanStudyResult result;
  std::vector<IntervalPerformance> per_rep(plan.R);
  for (std::size_t e = 0; e < methods.size(); ++e) {
    for (std::size_t r = 0; r < plan.R; ++r) {
      per_rep[r] = tallies[r].plain[e].performance(plan.N);
    }
    result.uncalibrated.push_back(assemble(plan, methods[e], per_rep));
  }
  if (plan.calibrate) {
    double beta_sum = 0.0;
    for (const auto& t : tallies) beta_sum += t.beta_sum;
    result.mean_beta = beta_sum / static_cast<double>(plan.R * plan.N);
    const CalibrationOptions opts{std::nullopt, plan.skip_delta};
    for (std::size_t e = 0; e < methods.size(); ++e) {
      const auto& plain = result.uncalibrated[e];
      CalibrationOptions with_cov = opts;
      with_cov.observed_coverage = plain.pooled.coverage;
      if (calibration_skipped(plan.alpha(), with_cov)) {
        auto kept = plain;
        kept.calibration_skipped = true;
        result.calibrated.push_back(std::move(kept));
        continue;
      }
      for (std::size_t r = 0; r < plan.R; ++r) {
        per_rep[r] = tallies[r].calibrated[e].performance(plan.N);
      }
      result.calibrated.push_back(assemble(plan, methods[e], per_rep));
    }
  }
  return result;
}

std::vector<ProportionEstimatorStudy> run_proportion_study(
    const SimulationPlan& plan) {
  plan.validate();
  if (plan.is_mean_study()) throw PlanError("run_proportion_study needs a binomial model");
  const auto& model = std::get<BinomialModel>(plan.model);
  const Probability p(model.p);
  const Probability alpha = plan.alpha();

  std::vector<std::uint64_t> counts(plan.R);
  const StreamKey root(plan.master_seed);
  parallel_for(plan.R, plan.workers, [&](std::size_t r) {
    Rng rng(root.child(r));
    counts[r] = static_cast<std::uint64_t>(draw_sample(plan.model, 1, rng)[0]);
  });

  std::vector<ProportionEstimatorStudy> out;
  for (const auto& e : plan.estimators) {
    const auto method = std::get<ProportionMethod>(e);
    // Intervals depend only on x, so each distinct count is evaluated once.
    std::vector<std::optional<ConfidenceInterval>> cache(model.trials + 1);
    Tally tally;
    for (auto x : counts) {
      auto& ci = cache[x];
      if (!ci) ci = proportion_interval(method, {model.trials, x}, alpha);
      tally.add(*ci, model.p);
    }
    const auto perf = tally.performance(plan.R);
    ProportionEstimatorStudy study{
        method,
        {method, perf.coverage, perf.mean_length, compute_index(perf, plan.index)},
        {}};
    if (model.trials <= 10000) {
      study.exact = exact_performance(method, model.trials, p, alpha);
    }
    out.push_back(std::move(study));
  }
  return out;
}

}  // namespace ciindex
