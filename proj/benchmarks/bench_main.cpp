#include <benchmark/benchmark.h>

#include <algorithm>

#include "ciindex/harness.hpp"
#include "ciindex/mean_intervals.hpp"
#include "ciindex/proportion_intervals.hpp"
#include "ciindex/sampling.hpp"
#include "ciindex/special_functions.hpp"

using namespace ciindex;

namespace {

void BM_BetaQuantile(benchmark::State& state) {
  double p = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(special::beta_quantile(p, 3.5, 17.5));
    p = p < 0.98 ? p + 0.01 : 0.01;
  }
}
BENCHMARK(BM_BetaQuantile);

void BM_StudentTQuantile(benchmark::State& state) {
  double p = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(special::student_t_quantile(p, 9.0));
    p = p < 0.99 ? p + 0.001 : 0.5;
  }
}
BENCHMARK(BM_StudentTQuantile);

void BM_BootstrapReplicates(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Sample x = draw_sample(NormalModel{2.0, 1.0}, n, SeedSpec{1, {0}});
  std::uint64_t i = 0;
  for (auto _ : state) {
    auto reps = bootstrap_replicates(x, 200, StreamKey(7).child(i++), false);
    benchmark::DoNotOptimize(reps.means.data());
  }
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_BootstrapReplicates)->Arg(10)->Arg(50)->Arg(500);

void BM_BcaInterval(benchmark::State& state) {
  const Sample x = draw_sample(LognormalModel{0.0, 1.0}, 30, SeedSpec{3, {0}});
  auto sorted = bootstrap_replicates(x, 1000, StreamKey(5), false).means;
  std::sort(sorted.begin(), sorted.end());
  const double theta = describe(x).mean;
  for (auto _ : state) {
    const double a = jackknife_acceleration(x);
    benchmark::DoNotOptimize(bca_from_sorted(sorted, theta, a, Probability(0.05)));
  }
}
BENCHMARK(BM_BcaInterval);

void BM_MeanReplication(benchmark::State& state) {
  SimulationPlan plan;
  plan.model = NormalModel{2.0, 1.0};
  plan.n = static_cast<std::size_t>(state.range(0));
  plan.N = 100;
  plan.B = 200;
  plan.R = 1;
  plan.calibrate = state.range(1) != 0;
  for (auto m : kAllMeanMethods) plan.estimators.emplace_back(m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_mean_study(plan).uncalibrated.size());
    ++plan.master_seed;
  }
}
BENCHMARK(BM_MeanReplication)->Args({10, 0})->Args({10, 1})->Args({50, 0})
    ->Unit(benchmark::kMillisecond);

void BM_ExactPerformance(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    for (auto m : kAllProportionMethods) {
      benchmark::DoNotOptimize(exact_performance(m, n, Probability(0.1), Probability(0.05)));
    }
  }
}
BENCHMARK(BM_ExactPerformance)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
