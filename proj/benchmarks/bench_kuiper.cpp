#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "deepclife/divergence.hpp"
#include "deepclife/kuiper.hpp"

namespace {

void BM_UpperBound(benchmark::State& state) {
  double lambda = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(deepclife::log_kd_upper_grad(lambda, false));
    lambda = lambda > 5.0 ? 0.5 : lambda + 1e-3;
  }
}
BENCHMARK(BM_UpperBound);

void BM_ReferenceSeries(benchmark::State& state) {
  double lambda = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(deepclife::kd_reference(lambda));
    lambda = lambda > 5.0 ? 0.5 : lambda + 1e-3;
  }
}
BENCHMARK(BM_ReferenceSeries);

deepclife::EmpiricalLifetimeDistribution curve(double scale, std::size_t len, double n) {
  std::vector<double> v(len);
  for (std::size_t t = 0; t < len; ++t) v[t] = std::exp(-static_cast<double>(t) / scale);
  return {v, n, false};
}

void BM_Delta(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto a = curve(40.0, len, 500.0), b = curve(70.0, len, 300.0);
  const deepclife::DivergenceSpec kuiper{deepclife::KuiperUB{false}, deepclife::AllPairs{}, true};
  const deepclife::DivergenceSpec mmd{deepclife::MMD{}, deepclife::AllPairs{}, true};
  const auto& spec = state.range(1) == 0 ? kuiper : mmd;
  for (auto _ : state) benchmark::DoNotOptimize(deepclife::delta(spec, a, b));
  state.SetLabel(state.range(1) == 0 ? "kuiper_ub" : "mmd");
}
BENCHMARK(BM_Delta)->Args({151, 0})->Args({151, 1})->Args({1001, 0})->Args({1001, 1});

}  // namespace
