#include <cmath>
#include <sstream>

#include <json.hpp>

#include "modelcmp/errors.hpp"
#include "modelcmp/report.hpp"

namespace modelcmp {

using nlohmann::json;

namespace {

json family_to_json(const FamilyOfBest& family) {
  return json{{"method", to_string(family.method)},
              {"members", family.members},
              {"epistemic_note", family.epistemic_note}};
}

FamilyOfBest family_from_json(const json& j) {
  FamilyOfBest family;
  const std::string method = j.at("method");
  if (method == "naive") family.method = EvalMethod::naive;
  else if (method == "nhst") family.method = EvalMethod::nhst;
  else if (method == "bayes") family.method = EvalMethod::bayes;
  else throw ValidationError("report JSON: unknown family method " + method);
  family.members = j.at("members").get<std::vector<std::string>>();
  family.epistemic_note = j.at("epistemic_note");
  return family;
}

json optional_double(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

double double_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json config_to_json(const RunConfig& c) {
  json columns{{"value", c.columns.value},
               {"resample", c.columns.resample},
               {"dataset", c.columns.dataset_cols},
               {"model", c.columns.model}};
  json out{{"input", c.input_path},
           {"columns", columns},
           {"alpha", c.alpha},
           {"rope", c.rope},
           {"threshold", c.threshold},
           {"rho", c.rho ? json(*c.rho) : json(nullptr)},
           {"cv_train_frac", c.cv_train_frac ? json(*c.cv_train_frac) : json(nullptr)},
           {"chains", c.mcmc.chains},
           {"draws", c.mcmc.total_draws},
           {"burn_in", c.mcmc.burn_in},
           {"seed", c.seed},
           {"out", c.out_dir},
           {"format", c.formats},
           {"jobs", c.jobs},
           {"force_posthoc", c.force_posthoc},
           {"simplex_plots", c.simplex_plots}};
  return out;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.input_path = j.at("input");
  c.columns.value = j.at("columns").at("value");
  c.columns.resample = j.at("columns").at("resample");
  c.columns.dataset_cols = j.at("columns").at("dataset").get<std::vector<std::string>>();
  c.columns.model = j.at("columns").at("model");
  c.alpha = j.at("alpha");
  c.rope = j.at("rope");
  c.threshold = j.at("threshold");
  if (!j.at("rho").is_null()) c.rho = j.at("rho").get<double>();
  if (!j.at("cv_train_frac").is_null())
    c.cv_train_frac = j.at("cv_train_frac").get<double>();
  c.mcmc.chains = j.at("chains");
  c.mcmc.total_draws = j.at("draws");
  c.mcmc.burn_in = j.at("burn_in");
  c.seed = j.at("seed");
  c.out_dir = j.at("out");
  c.formats = j.at("format").get<std::vector<std::string>>();
  c.jobs = j.at("jobs");
  c.force_posthoc = j.at("force_posthoc");
  c.simplex_plots = j.at("simplex_plots");
  return c;
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "x_better") return Verdict::x_better;
  if (s == "y_better") return Verdict::y_better;
  if (s == "rope") return Verdict::rope;
  if (s == "no_decision") return Verdict::no_decision;
  throw ValidationError("report JSON: unknown verdict " + s);
}

json bundle_to_json(const ReportBundle& bundle) {
  json root;
  root["meta"] = json{{"input_sha256", bundle.meta.input_sha256},
                      {"seed", bundle.meta.seed},
                      {"config", config_to_json(bundle.meta.config)},
                      {"version", bundle.meta.version}};
  root["models"] = bundle.models;
  root["metric"] = bundle.metric_name;
  root["overall_means"] = bundle.overall_means;

  if (bundle.naive) {
    root["naive"] = json{{"family", family_to_json(bundle.naive->family)},
                         {"means", bundle.naive->means}};
  } else {
    root["naive"] = nullptr;
  }

  if (bundle.friedman) {
    const auto& fr = *bundle.friedman;
    json sig = nullptr;
    std::size_t decided = 0, pairs = 0;
    if (fr.posthoc) {
      sig = json::array();
      const std::size_t k = fr.posthoc->significant.size();
      for (std::size_t i = 0; i < k; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < k; ++j) {
          row.push_back(static_cast<bool>(fr.posthoc->significant[i][j]));
          if (j > i) {
            ++pairs;
            if (fr.posthoc->significant[i][j]) ++decided;
          }
        }
        sig.push_back(row);
      }
    }
    root["friedman"] =
        json{{"statistic", fr.omnibus.statistic},
             {"dof", fr.omnibus.dof},
             {"p_value", fr.omnibus.p_value},
             {"alpha", fr.posthoc ? fr.posthoc->alpha : bundle.meta.config.alpha},
             {"q_alpha", fr.posthoc ? json(fr.posthoc->q_alpha) : json(nullptr)},
             {"cd", fr.posthoc ? json(fr.posthoc->cd) : json(nullptr)},
             {"avg_ranks", fr.avg_ranks},
             {"family", fr.family ? family_to_json(*fr.family) : json(nullptr)},
             {"significant", sig},
             {"decided_fraction",
              pairs ? json(static_cast<double>(decided) / static_cast<double>(pairs))
                    : json(nullptr)},
             {"forced", fr.forced},
             {"top_rank_tied", fr.top_rank_tied}};
  } else {
    root["friedman"] = nullptr;
  }

  if (bundle.bayes) {
    const auto& bs = *bundle.bayes;
    const std::size_t k = bs.matrix.models.size();
    json decisions = json::array();
    for (std::size_t i = 0; i < k; ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < k; ++j)
        row.push_back(to_string(bs.matrix.cell(i, j)));
      decisions.push_back(row);
    }
    json summaries = json::array();
    json flags = json::array();
    for (const auto& s : bs.matrix.pair_summaries) {
      summaries.push_back(json{{"x", bs.matrix.models[s.i]},
                               {"y", bs.matrix.models[s.j]},
                               {"p_left", s.theta.p_left},
                               {"p_rope", s.theta.p_rope},
                               {"p_right", s.theta.p_right},
                               {"max_rhat", optional_double(s.max_rhat)},
                               {"min_ess", optional_double(s.min_ess)},
                               {"reliable", s.reliable}});
      if (!s.reliable)
        flags.push_back(json{{"x", bs.matrix.models[s.i]},
                             {"y", bs.matrix.models[s.j]},
                             {"max_rhat", optional_double(s.max_rhat)}});
    }
    root["bayes"] = json{{"threshold", bs.matrix.threshold},
                         {"rope", bs.matrix.rope},
                         {"decisions", decisions},
                         {"theta_summaries", summaries},
                         {"families", json{{"bayes", family_to_json(bs.family)}}},
                         {"diagnostics_flags", flags},
                         {"decided_fraction", bs.matrix.decided_fraction()}};
  } else {
    root["bayes"] = nullptr;
  }
  return root;
}

}  // namespace

std::string emit_report(const ReportBundle& bundle, ReportFormat format) {
  if (format == ReportFormat::json) return bundle_to_json(bundle).dump(2) + "\n";

  // Markdown.
  std::ostringstream md;
  auto fmt = [](double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
  };
  const auto& models = bundle.models;
  auto model_index = [&](const std::string& id) {
    for (std::size_t i = 0; i < models.size(); ++i)
      if (models[i] == id) return i;
    throw ValidationError("report: family member not in model list: " + id);
  };

  auto family_table = [&](const FamilyOfBest& family) {
    const bool have_ranks = bundle.friedman.has_value();
    md << "| Algorithm | Avg. Rank | Avg. " << bundle.metric_name
       << " | Diff. In Ranks | Diff. In " << bundle.metric_name << " |\n";
    md << "|---|---|---|---|---|\n";
    const std::size_t f1 = model_index(family.members.front());
    for (const auto& member : family.members) {
      const std::size_t idx = model_index(member);
      md << "| " << member << " | "
         << (have_ranks ? fmt(bundle.friedman->avg_ranks[idx]) : std::string("NA"))
         << " | " << fmt(bundle.overall_means[idx]) << " | ";
      if (idx == f1) {
        md << "NA | NA |\n";
      } else {
        if (have_ranks)
          md << fmt(bundle.friedman->avg_ranks[f1] - bundle.friedman->avg_ranks[idx]);
        else
          md << "NA";
        md << " | " << fmt(bundle.overall_means[f1] - bundle.overall_means[idx])
           << " |\n";
      }
    }
  };

  md << "# Model comparison report\n\n";
  md << "- metric: " << bundle.metric_name << "\n";
  md << "- models: " << models.size() << "\n";
  md << "- input sha256: `" << bundle.meta.input_sha256 << "`\n";
  md << "- seed: " << bundle.meta.seed << "\n";
  md << "- tool version: " << bundle.meta.version << "\n\n";

  if (bundle.naive) {
    md << "## Naive average\n\n";
    family_table(bundle.naive->family);
    md << "\nNote: " << bundle.naive->family.epistemic_note << ".\n\n";
  }

  if (bundle.friedman) {
    const auto& fr = *bundle.friedman;
    md << "## Friedman / Nemenyi (NHST)\n\n";
    md << "- Friedman chi-square = " << fmt(fr.omnibus.statistic) << " with "
       << fr.omnibus.dof << " dof, p = " << fmt(fr.omnibus.p_value) << "\n";
    if (fr.posthoc) {
      md << "- alpha = " << fmt(fr.posthoc->alpha)
         << ", q_alpha = " << fmt(fr.posthoc->q_alpha)
         << ", CD = " << fmt(fr.posthoc->cd) << "\n";
      std::size_t decided = 0, pairs = 0;
      const std::size_t k = fr.posthoc->significant.size();
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
          ++pairs;
          if (fr.posthoc->significant[i][j]) ++decided;
        }
      md << "- decided pairwise comparisons: " << decided << "/" << pairs << " ("
         << fmt(100.0 * static_cast<double>(decided) / static_cast<double>(pairs))
         << "%)\n";
      if (fr.forced) md << "- WARNING: post-hoc forced despite a retained omnibus\n";
      if (fr.top_rank_tied)
        md << "- NOTE: top average rank is shared; f1 is the lexicographically "
              "first of the tied models\n";
      md << "\n";
      if (fr.family) {
        family_table(*fr.family);
        md << "\nNote: " << fr.family->epistemic_note << ".\n\n";
      }
    } else {
      md << "- omnibus retained H0 at alpha = " << fmt(bundle.meta.config.alpha)
         << ": family undefined, no post-hoc run\n\n";
    }
  }

  if (bundle.bayes) {
    const auto& bs = *bundle.bayes;
    md << "## Bayesian hierarchical correlated t-test\n\n";
    md << "- ROPE half-width = " << fmt(bs.matrix.rope)
       << ", decision threshold = " << fmt(bs.matrix.threshold) << "\n";
    md << "- decided pairwise comparisons: "
       << fmt(100.0 * bs.matrix.decided_fraction()) << "%\n";
    std::size_t unreliable = 0;
    for (const auto& s : bs.matrix.pair_summaries)
      if (!s.reliable) ++unreliable;
    if (unreliable)
      md << "- WARNING: " << unreliable
         << " pair(s) had R-hat above 1.05 and were forced to no_decision\n";
    md << "\n";
    family_table(bs.family);
    md << "\nNote: " << bs.family.epistemic_note << ".\n\n";
  }

  // Side-by-side family sizes: the headline comparison.
  md << "## Families side by side\n\n";
  auto family_line = [&](const char* name, const FamilyOfBest& family) {
    md << "- " << name << " (" << family.members.size() << "): ";
    for (std::size_t i = 0; i < family.members.size(); ++i) {
      if (i) md << ", ";
      md << family.members[i];
    }
    md << "\n";
  };
  if (bundle.naive) family_line("naive", bundle.naive->family);
  if (bundle.friedman && bundle.friedman->family)
    family_line("nhst", *bundle.friedman->family);
  if (bundle.friedman && !bundle.friedman->family)
    md << "- nhst: undefined (omnibus retained H0)\n";
  if (bundle.bayes) family_line("bayes", bundle.bayes->family);
  return md.str();
}

ReportBundle parse_report_json(const std::string& text) {
  const json root = json::parse(text);
  ReportBundle bundle;
  bundle.meta.input_sha256 = root.at("meta").at("input_sha256");
  bundle.meta.seed = root.at("meta").at("seed");
  bundle.meta.config = config_from_json(root.at("meta").at("config"));
  bundle.meta.version = root.at("meta").at("version");
  bundle.models = root.at("models").get<std::vector<std::string>>();
  bundle.metric_name = root.at("metric");
  bundle.overall_means = root.at("overall_means").get<std::vector<double>>();

  if (!root.at("naive").is_null()) {
    NaiveSection naive;
    naive.family = family_from_json(root.at("naive").at("family"));
    naive.means = root.at("naive").at("means").get<std::vector<double>>();
    bundle.naive = std::move(naive);
  }

  if (!root.at("friedman").is_null()) {
    const json& fj = root.at("friedman");
    FriedmanSection fr;
    fr.omnibus.statistic = fj.at("statistic");
    fr.omnibus.dof = fj.at("dof");
    fr.omnibus.p_value = fj.at("p_value");
    fr.avg_ranks = fj.at("avg_ranks").get<std::vector<double>>();
    fr.omnibus.n_models = fr.avg_ranks.size();
    fr.forced = fj.at("forced");
    fr.top_rank_tied = fj.at("top_rank_tied");
    if (!fj.at("cd").is_null()) {
      NemenyiOutcome posthoc;
      posthoc.alpha = fj.at("alpha");
      posthoc.q_alpha = fj.at("q_alpha");
      posthoc.cd = fj.at("cd");
      for (const auto& row : fj.at("significant"))
        posthoc.significant.push_back(row.get<std::vector<bool>>());
      fr.posthoc = std::move(posthoc);
    }
    if (!fj.at("family").is_null()) fr.family = family_from_json(fj.at("family"));
    bundle.friedman = std::move(fr);
  }

  if (!root.at("bayes").is_null()) {
    const json& bj = root.at("bayes");
    BayesSection bs;
    bs.matrix.models = bundle.models;
    bs.matrix.threshold = bj.at("threshold");
    bs.matrix.rope = bj.at("rope");
    const std::size_t k = bundle.models.size();
    bs.matrix.cells.assign(k * k, Verdict::no_decision);
    const json& decisions = bj.at("decisions");
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        bs.matrix.cells[i * k + j] = verdict_from_string(decisions.at(i).at(j));
    auto index_of = [&](const std::string& id) {
      for (std::size_t i = 0; i < bundle.models.size(); ++i)
        if (bundle.models[i] == id) return i;
      throw ValidationError("report JSON: unknown model in theta_summaries: " + id);
    };
    for (const auto& sj : bj.at("theta_summaries")) {
      DecisionMatrix::PairSummary s;
      s.i = index_of(sj.at("x"));
      s.j = index_of(sj.at("y"));
      s.theta.p_left = sj.at("p_left");
      s.theta.p_rope = sj.at("p_rope");
      s.theta.p_right = sj.at("p_right");
      s.max_rhat = double_or_nan(sj.at("max_rhat"));
      s.min_ess = double_or_nan(sj.at("min_ess"));
      s.reliable = sj.at("reliable");
      bs.matrix.pair_summaries.push_back(std::move(s));
    }
    bs.family = family_from_json(bj.at("families").at("bayes"));
    bundle.bayes = std::move(bs);
  }
  return bundle;
}

}  // namespace modelcmp
