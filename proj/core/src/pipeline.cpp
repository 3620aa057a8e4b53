#include "modelcmp/pipeline.hpp"

#include <algorithm>

#include "modelcmp/errors.hpp"
#include "modelcmp/version.hpp"

namespace modelcmp {

NaiveSection run_naive(const PerfTable& table) {
  NaiveSection section;
  section.means = overall_means(table);
  section.family = naive_best(table);
  return section;
}

FriedmanSection run_friedman(const PerfTable& table, double alpha, bool force_posthoc) {
  FriedmanSection section;
  const RankMatrix ranks = rank_matrix(dataset_means(table), table.higher_is_better());
  section.avg_ranks = ranks.avg_ranks;
  section.omnibus = friedman_statistic(ranks, table.n_datasets());

  const bool significant = section.omnibus.p_value < alpha;
  if (significant || force_posthoc) {
    section.posthoc = nemenyi(ranks, table.n_datasets(), alpha);
    section.forced = !significant;
    section.family = nhst_family(ranks, table.models(), section.omnibus,
                                 *section.posthoc, force_posthoc);
    const double best = *std::min_element(ranks.avg_ranks.begin(), ranks.avg_ranks.end());
    section.top_rank_tied =
        std::count(ranks.avg_ranks.begin(), ranks.avg_ranks.end(), best) > 1;
  }
  return section;
}

BayesSection run_bayes(const PerfTable& table, const BayesConfig& config) {
  BayesSection section;
  section.matrix = bayes_decision_matrix(table, config);
  section.family =
      bayes_family(section.matrix, overall_means(table), table.higher_is_better());
  return section;
}

BayesConfig make_bayes_config(const RunConfig& config, const PerfTable& table,
                              bool* rho_clamped) {
  BayesConfig bayes;
  bayes.rho = config.effective_rho(table, rho_clamped);
  bayes.rope = config.rope;
  bayes.threshold = config.threshold;
  bayes.mcmc = config.mcmc;
  bayes.seed = config.seed;
  bayes.jobs = config.jobs;
  return bayes;
}

ReportBundle run_report(const PerfTable& table, const RunConfig& config,
                        const std::string& input_sha256,
                        const MethodSelection& methods) {
  ReportBundle bundle;
  bundle.meta.input_sha256 = input_sha256;
  bundle.meta.seed = config.seed;
  bundle.meta.config = config;
  // jobs is a pure performance knob; results are schedule-independent, so
  // it is excluded from provenance to keep reports byte-identical across
  // any parallelism degree.
  bundle.meta.config.jobs = 0;
  bundle.meta.version = kVersion;
  bundle.models = table.models();
  bundle.metric_name = table.metric_name();
  bundle.overall_means = overall_means(table);

  if (methods.naive) bundle.naive = run_naive(table);
  if (methods.friedman)
    bundle.friedman = run_friedman(table, config.alpha, config.force_posthoc);
  if (methods.bayes) bundle.bayes = run_bayes(table, make_bayes_config(config, table));
  return bundle;
}

}  // namespace modelcmp
