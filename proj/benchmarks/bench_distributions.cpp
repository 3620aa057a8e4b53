#include <benchmark/benchmark.h>

#include <vector>

#include "modelcmp/bayes_eval.hpp"
#include "modelcmp/distributions.hpp"
#include "modelcmp/freq_eval.hpp"
#include "modelcmp/rng.hpp"

using namespace modelcmp;

static void BM_ChiSquareUpperTail(benchmark::State& state) {
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(chi_square_upper_tail(x, 7));
    x += 0.01;
    if (x > 40.0) x = 0.5;
  }
}
BENCHMARK(BM_ChiSquareUpperTail);

static void BM_StudentCdf(benchmark::State& state) {
  double t = -4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dist::student_cdf(t, 9.0));
    t += 0.01;
    if (t > 4.0) t = -4.0;
  }
}
BENCHMARK(BM_StudentCdf);

// Uncached cost of one quantile: alpha is jittered to defeat the memo.
static void BM_StudentizedRangeQuantile(benchmark::State& state) {
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  double alpha = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(studentized_range_quantile(k, alpha));
    alpha += 1e-7;
  }
}
BENCHMARK(BM_StudentizedRangeQuantile)->Arg(5)->Arg(96);

static void BM_CsGaussianLogpdf(benchmark::State& state) {
  Rng rng(1);
  std::vector<double> x(10);
  for (double& v : x) v = rng.normal() * 0.05;
  for (auto _ : state)
    benchmark::DoNotOptimize(cs_gaussian_logpdf(x, 0.01, 0.0025, 1.0 / 9.0));
}
BENCHMARK(BM_CsGaussianLogpdf);
