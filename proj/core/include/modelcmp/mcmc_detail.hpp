#ifndef MODELCMP_MCMC_DETAIL_HPP
#define MODELCMP_MCMC_DETAIL_HPP

#include <cstdint>

#include "modelcmp/bayes_eval.hpp"

namespace modelcmp::detail {

/// Snapshot of a sampler after some sweeps: the state plus the log
/// posterior recomputed from the sampler's incremental caches. Tests check
/// the cached value against hier_log_posterior to catch cache drift.
struct SamplerProbe {
  HierState state;
  double cached_log_posterior = 0.0;
};

SamplerProbe run_sampler_probe(const PairDifferences& diffs, const HierPriors& priors,
                               std::uint64_t seed, std::size_t sweeps);

}  // namespace modelcmp::detail

#endif
