#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "deepclife/kaplan_meier.hpp"

namespace {

struct Batch {
  std::vector<std::int64_t> lifetimes;
  std::vector<double> beta;
  Eigen::MatrixXd alpha;
};

Batch random_batch(std::size_t n, std::size_t clusters, std::int64_t t_max) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> life(0, t_max);
  std::uniform_real_distribution<double> unit;
  Batch b;
  b.alpha.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(clusters));
  for (std::size_t i = 0; i < n; ++i) {
    b.lifetimes.push_back(life(rng));
    b.beta.push_back(unit(rng));
    double total = 0.0;
    for (std::size_t k = 0; k < clusters; ++k) total += b.alpha(i, k) = unit(rng) + 1e-3;
    b.alpha.row(i) /= total;
  }
  return b;
}

void BM_WeightedKaplanMeier(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto b = random_batch(n, 1, 150);
  const std::vector<double> ones(n, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(deepclife::weighted_kaplan_meier(b.lifetimes, 150, ones, b.beta));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WeightedKaplanMeier)->Arg(256)->Arg(1024)->Arg(8192);

void BM_TapeForwardBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t clusters = 3;
  const auto b = random_batch(n, clusters, 150);
  const std::vector<std::vector<double>> grads(clusters, std::vector<double>(151, 1.0));
  const std::vector<double> n_grads(clusters, 1.0);
  for (auto _ : state) {
    deepclife::KaplanMeierTape tape(b.lifetimes, 150, b.alpha, b.beta);
    benchmark::DoNotOptimize(tape.backward(grads, n_grads));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TapeForwardBackward)->Arg(256)->Arg(1024)->Arg(8192);

}  // namespace
