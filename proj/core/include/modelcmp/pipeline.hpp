#ifndef MODELCMP_PIPELINE_HPP
#define MODELCMP_PIPELINE_HPP

#include <string>

#include "modelcmp/report.hpp"

namespace modelcmp {

/// One evaluation method over a validated table.
NaiveSection run_naive(const PerfTable& table);
FriedmanSection run_friedman(const PerfTable& table, double alpha, bool force_posthoc);
BayesSection run_bayes(const PerfTable& table, const BayesConfig& config);

/// Which methods a bundle should include.
struct MethodSelection {
  bool naive = true;
  bool friedman = true;
  bool bayes = true;
};

/// Runs the selected methods and assembles the provenance-complete bundle.
ReportBundle run_report(const PerfTable& table, const RunConfig& config,
                        const std::string& input_sha256,
                        const MethodSelection& methods = {});

/// BayesConfig derived from a RunConfig and a table (rho resolution, seed,
/// jobs, sampler settings).
BayesConfig make_bayes_config(const RunConfig& config, const PerfTable& table,
                              bool* rho_clamped = nullptr);

}  // namespace modelcmp

#endif
