#include <benchmark/benchmark.h>

#include "qdesign/aupl.hpp"
#include "qdesign/crb.hpp"

namespace {

using qdesign::NoiseDensity;
using qdesign::Quantizer;

void BM_GOfTheta(benchmark::State& state) {
  const auto d = NoiseDensity::generalized_gaussian(state.range(0) / 10.0, 0.25);
  const auto q = Quantizer::sine();
  double theta = -0.37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qdesign::g_of_theta(q, d, theta));
  }
}
BENCHMARK(BM_GOfTheta)->Arg(10)->Arg(20);

void BM_MaxCrb(benchmark::State& state) {
  const auto d = NoiseDensity::gaussian(0.04);
  const auto q = Quantizer::sine();
  const int L = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qdesign::max_crb(q, d, L).phi);
  }
}
BENCHMARK(BM_MaxCrb)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_PrecomputeCoefficients(benchmark::State& state) {
  const auto d = NoiseDensity::gaussian(0.04);
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qdesign::precompute_coefficients(d, K, K).a.data());
  }
}
BENCHMARK(BM_PrecomputeCoefficients)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Objective(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const auto co = qdesign::precompute_coefficients(NoiseDensity::gaussian(0.04), K, K);
  const auto m = qdesign::starting_points(K)[1].slopes;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qdesign::objective(co, m).value);
  }
}
BENCHMARK(BM_Objective)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
