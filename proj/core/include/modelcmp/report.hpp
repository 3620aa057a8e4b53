#ifndef MODELCMP_REPORT_HPP
#define MODELCMP_REPORT_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modelcmp/bayes_eval.hpp"
#include "modelcmp/config.hpp"
#include "modelcmp/freq_eval.hpp"
#include "modelcmp/ranking.hpp"

namespace modelcmp {

/// A probability triple in barycentric coordinates; components sum to 1.
struct SimplexPoint {
  double p_left = 0.0;   // X better
  double p_rope = 0.0;
  double p_right = 0.0;  // X worse
};

struct NaiveSection {
  FamilyOfBest family;
  std::vector<double> means;  // per model, table order
};

struct FriedmanSection {
  FriedmanOutcome omnibus;
  std::vector<double> avg_ranks;               // per model, table order
  std::optional<NemenyiOutcome> posthoc;       // absent when omnibus retained
  std::optional<FamilyOfBest> family;
  bool forced = false;          // post-hoc forced despite a retained omnibus
  bool top_rank_tied = false;   // f1 shared the best average rank
};

struct BayesSection {
  DecisionMatrix matrix;
  FamilyOfBest family;
};

struct ReportMeta {
  std::string input_sha256;
  std::uint64_t seed = 0;
  RunConfig config;
  std::string version;
};

/// Unified output of a run: any subset of the three methods, plus enough
/// provenance (input digest, config, seed, version) to reproduce the run.
struct ReportBundle {
  ReportMeta meta;
  std::vector<std::string> models;
  std::string metric_name;
  std::vector<double> overall_means;  // per model, table order
  std::optional<NaiveSection> naive;
  std::optional<FriedmanSection> friedman;
  std::optional<BayesSection> bayes;
};

enum class ReportFormat { json, markdown };

/// Schema-stable report document. JSON top-level keys: meta, naive,
/// friedman, bayes (null when a method did not run). Markdown mirrors the
/// familiar family table: label, average rank, average metric, rank
/// difference and metric difference against the top model.
std::string emit_report(const ReportBundle& bundle, ReportFormat format);

/// Inverse of emit_report(json); used by consumers and round-trip tests.
ReportBundle parse_report_json(const std::string& text);

/// Critical-difference diagram: a [1, k] rank axis, one marker per model,
/// and a bold bar under every maximal group of models whose rank span is
/// within cd. The group containing the best-ranked model is highlighted.
/// Byte-deterministic for identical inputs. Above 40 models the labels
/// switch to a condensed multi-column layout.
std::string cd_diagram(const std::vector<double>& avg_ranks, double cd,
                       const std::vector<std::string>& labels);

/// k-by-k verdict grid; `order` permutes models (both axes) into decreasing
/// performance order. Cell fill and glyph encode the verdict; cells carry
/// the column model's performance rank.
std::string windowpane(const DecisionMatrix& matrix,
                       const std::vector<std::size_t>& order);

/// Barycentric posterior plot of probability triples with the three
/// decision sectors and per-sector sample proportions.
std::string simplex_plot(std::span<const SimplexPoint> samples, double rope,
                         const std::string& title = "");

/// Decreasing-performance permutation of model indices.
std::vector<std::size_t> performance_order(const std::vector<double>& means,
                                           bool higher_is_better);

/// Maximal runs [begin, end] (inclusive, indices into the ascending-sorted
/// rank vector) whose total rank span is <= cd; these are the bars of the
/// CD diagram. Runs of length one are omitted.
std::vector<std::pair<std::size_t, std::size_t>> cd_rank_groups(
    const std::vector<double>& sorted_ranks, double cd);

}  // namespace modelcmp

#endif
