#include <doctest.h>

#include <cmath>

#include "modelcmp/errors.hpp"
#include "modelcmp/report.hpp"
#include "modelcmp/rng.hpp"
#include "oracles.hpp"

using namespace modelcmp;

namespace {

ReportBundle tiny_bundle() {
  ReportBundle bundle;
  bundle.meta.input_sha256 = "abc123";
  bundle.meta.seed = 7;
  bundle.meta.config.input_path = "in.csv";
  bundle.meta.config.rho = 0.111;
  bundle.meta.version = "0.1.0";
  bundle.models = {"m1", "m2", "m3"};
  bundle.metric_name = "AUC";
  bundle.overall_means = {0.9, 0.88, 0.7};

  NaiveSection naive;
  naive.family.method = EvalMethod::naive;
  naive.family.members = {"m1"};
  naive.family.epistemic_note = "assumed";
  naive.means = bundle.overall_means;
  bundle.naive = naive;

  FriedmanSection fr;
  fr.omnibus.statistic = 6.5;
  fr.omnibus.dof = 2;
  fr.omnibus.p_value = 0.0388;
  fr.omnibus.n_datasets = 8;
  fr.omnibus.n_models = 3;
  fr.avg_ranks = {1.25, 1.75, 3.0};
  NemenyiOutcome posthoc;
  posthoc.alpha = 0.05;
  posthoc.q_alpha = 2.344;
  posthoc.cd = 1.172;
  posthoc.significant = {{false, false, true},
                         {false, false, true},
                         {true, true, false}};
  fr.posthoc = posthoc;
  FamilyOfBest nf;
  nf.method = EvalMethod::nhst;
  nf.members = {"m1", "m2"};
  nf.epistemic_note = "no conclusion";
  fr.family = nf;
  bundle.friedman = fr;

  BayesSection bayes;
  bayes.matrix.models = bundle.models;
  bayes.matrix.threshold = 0.95;
  bayes.matrix.rope = 0.01;
  bayes.matrix.cells = {Verdict::rope,     Verdict::rope,     Verdict::x_better,
                        Verdict::rope,     Verdict::rope,     Verdict::no_decision,
                        Verdict::y_better, Verdict::no_decision, Verdict::rope};
  bayes.matrix.pair_summaries = {
      {0, 1, Theta{0.01, 0.97, 0.02}, 1.002, 4000.0, true},
      {0, 2, Theta{0.99, 0.005, 0.005}, 1.01, 3200.0, true},
      {1, 2, Theta{0.6, 0.3, 0.1}, 1.11, 900.0, false},
  };
  bayes.family.method = EvalMethod::bayes;
  bayes.family.members = {"m1", "m2"};
  bayes.family.epistemic_note = "practically equivalent";
  bundle.bayes = bayes;
  return bundle;
}

}  // namespace

TEST_CASE("JSON report round-trips exactly") {
  const ReportBundle bundle = tiny_bundle();
  const std::string text = emit_report(bundle, ReportFormat::json);
  const ReportBundle back = parse_report_json(text);

  CHECK(back.meta.input_sha256 == bundle.meta.input_sha256);
  CHECK(back.meta.seed == bundle.meta.seed);
  CHECK(back.meta.config.rho == bundle.meta.config.rho);
  CHECK(back.models == bundle.models);
  CHECK(back.overall_means == bundle.overall_means);
  REQUIRE(back.naive.has_value());
  CHECK(back.naive->family.members == bundle.naive->family.members);
  REQUIRE(back.friedman.has_value());
  CHECK(back.friedman->omnibus.statistic == bundle.friedman->omnibus.statistic);
  CHECK(back.friedman->omnibus.p_value == bundle.friedman->omnibus.p_value);
  REQUIRE(back.friedman->posthoc.has_value());
  CHECK(back.friedman->posthoc->cd == bundle.friedman->posthoc->cd);
  CHECK(back.friedman->posthoc->significant == bundle.friedman->posthoc->significant);
  CHECK(back.friedman->avg_ranks == bundle.friedman->avg_ranks);
  REQUIRE(back.bayes.has_value());
  CHECK(back.bayes->matrix.cells == bundle.bayes->matrix.cells);
  CHECK(back.bayes->family.members == bundle.bayes->family.members);
  REQUIRE(back.bayes->matrix.pair_summaries.size() == 3);
  CHECK(back.bayes->matrix.pair_summaries[1].theta.p_left ==
        bundle.bayes->matrix.pair_summaries[1].theta.p_left);
  CHECK(back.bayes->matrix.pair_summaries[2].reliable == false);

  // Emitting the parsed bundle again is byte-identical.
  CHECK(emit_report(back, ReportFormat::json) == text);
}

TEST_CASE("frequentist-only report leaves bayes null") {
  ReportBundle bundle = tiny_bundle();
  bundle.bayes.reset();
  const std::string text = emit_report(bundle, ReportFormat::json);
  CHECK(text.find("\"bayes\": null") != std::string::npos);
  const ReportBundle back = parse_report_json(text);
  CHECK_FALSE(back.bayes.has_value());
}

TEST_CASE("markdown mirrors the family-table column set") {
  const std::string md = emit_report(tiny_bundle(), ReportFormat::markdown);
  CHECK(md.find("| Algorithm | Avg. Rank | Avg. AUC | Diff. In Ranks | Diff. In AUC |") !=
        std::string::npos);
  CHECK(md.find("## Naive average") != std::string::npos);
  CHECK(md.find("## Friedman / Nemenyi") != std::string::npos);
  CHECK(md.find("## Bayesian hierarchical") != std::string::npos);
  // f1 row carries NA differences; members carry signed diffs.
  CHECK(md.find("| m1 | 1.25 | 0.9 | NA | NA |") != std::string::npos);
  CHECK(md.find("| m2 | 1.75 | 0.88 | -0.5 | 0.02 |") != std::string::npos);
}

TEST_CASE("SVG emitters are deterministic") {
  const std::vector<double> ranks{1.2, 2.8, 3.1, 4.9};
  const std::vector<std::string> labels{"a", "b", "c", "d"};
  CHECK(cd_diagram(ranks, 1.0, labels) == cd_diagram(ranks, 1.0, labels));

  const ReportBundle bundle = tiny_bundle();
  const auto order = performance_order(bundle.overall_means, true);
  CHECK(windowpane(bundle.bayes->matrix, order) ==
        windowpane(bundle.bayes->matrix, order));

  std::vector<SimplexPoint> pts{{0.2, 0.5, 0.3}, {0.8, 0.1, 0.1}};
  CHECK(simplex_plot(pts, 0.01) == simplex_plot(pts, 0.01));
}

TEST_CASE("cd_diagram draws bars only for linked groups") {
  SUBCASE("two models inside cd share a bar") {
    const std::string svg =
        cd_diagram({1.0, 1.5}, 1.0, {"a", "b"});
    CHECK(svg.find("stroke-width=\"5.00\"") != std::string::npos);  // highlighted bar
  }
  SUBCASE("two models beyond cd have no bar") {
    const std::string svg = cd_diagram({1.0, 2.5}, 1.0, {"a", "b"});
    CHECK(svg.find("stroke-width=\"5.00\"") == std::string::npos);
    CHECK(svg.find("stroke-width=\"4.00\"") == std::string::npos);
  }
  SUBCASE("k=96 renders with the condensed label grid and no overlap") {
    std::vector<double> ranks(96);
    std::vector<std::string> labels(96);
    for (int i = 0; i < 96; ++i) {
      ranks[i] = 1.0 + 95.0 * i / 95.0;
      labels[i] = "model_" + std::to_string(i) + " (variant=long-name-" +
                  std::to_string(i) + ")";
    }
    const std::string svg = cd_diagram(ranks, 22.59, labels);
    CHECK(svg.find("model_95") != std::string::npos);
    // Condensed mode: no elbow connectors (gray polyline segments).
    CHECK(svg.find("stroke=\"#888888\"") == std::string::npos);
  }
}

TEST_CASE("cd grouping equals the brute-force interval closure") {
  Rng rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.next_u64() % 10;
    std::vector<double> ranks(k);
    for (double& r : ranks) r = rng.uniform(1.0, static_cast<double>(k));
    std::sort(ranks.begin(), ranks.end());
    const double cd = rng.uniform(0.05, 3.0);
    CHECK(cd_rank_groups(ranks, cd) == oracles::cd_groups_brute_force(ranks, cd));
  }
}

TEST_CASE("windowpane encodes verdicts and mirrors") {
  DecisionMatrix matrix;
  matrix.models = {"a", "b"};
  matrix.threshold = 0.95;
  matrix.rope = 0.01;

  SUBCASE("all no_decision gives a uniform grid") {
    matrix.cells = {Verdict::rope, Verdict::no_decision, Verdict::no_decision,
                    Verdict::rope};
    const std::string svg = windowpane(matrix, {0, 1});
    // Two off-diagonal cells share the no_decision fill.
    std::size_t count = 0, pos = 0;
    while ((pos = svg.find("#f7f7f7", pos)) != std::string::npos) {
      ++count;
      pos += 1;
    }
    CHECK(count >= 3);  // 2 cells + legend swatch
  }
  SUBCASE("x_better mirrors to y_better across the diagonal") {
    matrix.cells = {Verdict::rope, Verdict::x_better, Verdict::y_better, Verdict::rope};
    const std::string svg = windowpane(matrix, {0, 1});
    CHECK(svg.find("#3182bd") != std::string::npos);
    CHECK(svg.find("#de2d26") != std::string::npos);
  }
}

TEST_CASE("simplex projection hits vertices and centroid") {
  SUBCASE("pure triples land on labeled vertices") {
    const std::vector<SimplexPoint> pts{{1.0, 0.0, 0.0}};
    const std::string svg = simplex_plot(pts, 0.01);
    // Left vertex of the triangle is at x = (600-460)/2 = 70, y = 470.
    CHECK(svg.find("<circle cx=\"70.00\" cy=\"470.00\"") != std::string::npos);
  }
  SUBCASE("uniform triple lands on the centroid") {
    const std::vector<SimplexPoint> pts{{1.0 / 3, 1.0 / 3, 1.0 / 3}};
    const std::string svg = simplex_plot(pts, 0.01);
    const double cx = (70.0 + 530.0 + 300.0) / 3.0;
    const double cy = (470.0 + 470.0 + (470.0 - 460.0 * std::sqrt(3.0) / 2.0)) / 3.0;
    char expect[64];
    std::snprintf(expect, sizeof(expect), "<circle cx=\"%.2f\" cy=\"%.2f\"", cx, cy);
    CHECK(svg.find(expect) != std::string::npos);
  }
  SUBCASE("rope-concentrated samples report a rope-heavy proportion") {
    std::vector<SimplexPoint> pts(10000, SimplexPoint{0.02, 0.96, 0.02});
    const std::string svg = simplex_plot(pts, 0.01);
    CHECK(svg.find("rope 1,") != std::string::npos);
  }
  SUBCASE("projection preserves convexity") {
    Rng rng(404);
    for (int trial = 0; trial < 50; ++trial) {
      double a = rng.uniform(0.0, 1.0), b = rng.uniform(0.0, 1.0 - a);
      SimplexPoint p{a, b, 1.0 - a - b};
      double c = rng.uniform(0.0, 1.0), d = rng.uniform(0.0, 1.0 - c);
      SimplexPoint q{c, d, 1.0 - c - d};
      const double t = rng.uniform(0.0, 1.0);
      SimplexPoint mix{t * p.p_left + (1 - t) * q.p_left,
                       t * p.p_rope + (1 - t) * q.p_rope,
                       t * p.p_right + (1 - t) * q.p_right};
      // Projection is linear, so project(mix) = t*project(p) + (1-t)*project(q).
      auto project = [](const SimplexPoint& s, double& x, double& y) {
        const double lx = 70.0, rx = 530.0, by = 470.0;
        const double ty = 470.0 - 460.0 * std::sqrt(3.0) / 2.0;
        x = s.p_left * lx + s.p_rope * 300.0 + s.p_right * rx;
        y = s.p_left * by + s.p_rope * ty + s.p_right * by;
      };
      double px, py, qx, qy, mx, my;
      project(p, px, py);
      project(q, qx, qy);
      project(mix, mx, my);
      CHECK(mx == doctest::Approx(t * px + (1 - t) * qx).epsilon(1e-12));
      CHECK(my == doctest::Approx(t * py + (1 - t) * qy).epsilon(1e-12));
    }
  }
}
