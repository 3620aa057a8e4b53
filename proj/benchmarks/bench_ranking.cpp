#include <benchmark/benchmark.h>

#include "modelcmp/freq_eval.hpp"
#include "modelcmp/ranking.hpp"
#include "modelcmp/rng.hpp"

using namespace modelcmp;

static Matrix random_means(std::size_t n, std::size_t k) {
  Rng rng(7);
  Matrix means(n, k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) means.at(i, j) = rng.uniform(0.0, 1.0);
  return means;
}

static void BM_RankMatrix(benchmark::State& state) {
  const Matrix means = random_means(48, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rank_matrix(means, true));
}
BENCHMARK(BM_RankMatrix)->Arg(5)->Arg(96);

static void BM_FriedmanStatistic(benchmark::State& state) {
  const Matrix means = random_means(48, 96);
  const RankMatrix ranks = rank_matrix(means, true);
  for (auto _ : state) benchmark::DoNotOptimize(friedman_statistic(ranks, 48));
}
BENCHMARK(BM_FriedmanStatistic);
