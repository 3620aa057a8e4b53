#include <benchmark/benchmark.h>

#include "modelcmp/bayes_eval.hpp"
#include "modelcmp/calib_sim.hpp"

using namespace modelcmp;

// One full pairwise comparison at the experiment scale used in the
// acceptance suite: N datasets, 10 folds, 50k retained draws.
static void BM_PairComparison(benchmark::State& state) {
  GenSpec spec;
  spec.n_datasets = static_cast<std::size_t>(state.range(0));
  spec.n_folds = 10;
  spec.mu_0 = 0.01;
  spec.sigma_0 = 0.01;
  spec.sigma_i_scale = 0.04;
  spec.seed = 99;
  const GeneratedDifferences gen = generate_pair_differences(spec);
  const HierPriors priors = HierPriors::from_data(gen.diffs, spec.rho);

  std::uint64_t seed = 1;
  for (auto _ : state) {
    const Chains chains = run_mcmc(gen.diffs, priors, McmcConfig{}, seed++);
    const Diagnostics diag = diagnostics(chains);
    const Theta theta = posterior_theta(chains, 0.01);
    benchmark::DoNotOptimize(diag);
    benchmark::DoNotOptimize(theta);
  }
}
BENCHMARK(BM_PairComparison)->Arg(20)->Arg(48)->Unit(benchmark::kMillisecond);

static void BM_GeneratePairDifferences(benchmark::State& state) {
  GenSpec spec;
  spec.n_datasets = 48;
  spec.n_folds = 10;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    spec.seed = seed++;
    benchmark::DoNotOptimize(generate_pair_differences(spec));
  }
}
BENCHMARK(BM_GeneratePairDifferences);
