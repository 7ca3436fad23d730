#include <benchmark/benchmark.h>

#include <cmath>

#include "graduate/inference.hpp"
#include "graduate/sampler.hpp"

namespace {

using namespace graduate;

RateSurface smooth_surface(int populations, int ages) {
  RateSurface y;
  for (int j = 0; j < populations; ++j) y.populations.push_back("P" + std::to_string(j));
  y.log_rates.resize(populations, ages);
  for (int a = 0; a < ages; ++a) {
    y.ages.push_back(a + 1);
    for (int j = 0; j < populations; ++j)
      y.log_rates(j, a) = -9.0 + 0.09 * a + 0.2 * j + 0.05 * std::sin(0.7 * a + j);
  }
  y.missing = MissingMask::Constant(populations, ages, false);
  return y;
}

void BM_ForwardFilter(benchmark::State& state) {
  const int j = static_cast<int>(state.range(0));
  const bool common = state.range(1) != 0;
  const auto spec = common ? build_common_term(j) : build_local_linear(j);
  const auto y = smooth_surface(j, 104);
  const auto schedule = DiscountSchedule::uniform(0.9, 1, 104);
  const Eigen::MatrixXd V = Eigen::MatrixXd::Identity(j, j) * 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(forward_filter(spec, y, V, schedule));
}
BENCHMARK(BM_ForwardFilter)->Args({1, 0})->Args({2, 0})->Args({2, 1})->Args({3, 1});

void BM_FilterAndSample(benchmark::State& state) {
  const auto spec = build_common_term(2);
  const auto y = smooth_surface(2, 104);
  const auto pass =
      forward_filter(spec, y, Eigen::MatrixXd::Identity(2, 2) * 0.01, DiscountSchedule::uniform(0.9, 1, 104));
  RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(backward_sample(pass, spec, rng));
}
BENCHMARK(BM_FilterAndSample);

void BM_GibbsSweeps(benchmark::State& state) {
  const auto spec = build_common_term(2);
  auto y = smooth_surface(2, 104);
  for (int a = 2; a < 16; ++a) {
    y.log_rates(1, a) = std::nan("");
    y.missing(1, a) = true;
  }
  GibbsConfig cfg;
  cfg.iterations = static_cast<int>(state.range(0));
  cfg.burn_in = 0;
  const auto schedule = DiscountSchedule::uniform(0.9, 1, 104);
  for (auto _ : state) benchmark::DoNotOptimize(run_gibbs(spec, y, schedule, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.iterations);
}
BENCHMARK(BM_GibbsSweeps)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
