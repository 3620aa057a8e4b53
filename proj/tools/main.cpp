#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "modelcmp/calib_sim.hpp"
#include "modelcmp/config.hpp"
#include "modelcmp/errors.hpp"
#include "modelcmp/pipeline.hpp"
#include "modelcmp/report.hpp"
#include "modelcmp/sha256.hpp"
#include "modelcmp/version.hpp"

#include <json.hpp>

namespace fs = std::filesystem;
using namespace modelcmp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;  // usage / config / data problems
constexpr int kExitIo = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path + "\" for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failure on \"" + path + "\"");
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open \"" + path.string() + "\" for writing");
  out << content;
  if (!out) throw IoError("write failure on \"" + path.string() + "\"");
}

struct LoadedTable {
  PerfTable table;
  std::string sha256;
};

LoadedTable load_table(const RunConfig& config) {
  if (config.input_path.empty()) throw ConfigError("--input is required");
  const std::string bytes = read_file(config.input_path);
  std::istringstream stream(bytes);
  return {parse_results_csv(stream, config.columns), sha256_hex(bytes)};
}

fs::path ensure_out_dir(const RunConfig& config) {
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory \"" + dir.string() + "\"");
  return dir;
}

std::string sanitize(const std::string& id) {
  std::string out;
  for (char c : id) {
    if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(c);
    else out.push_back('_');
  }
  if (out.size() > 48) out.resize(48);
  return out;
}

void print_family(const FamilyOfBest& family) {
  std::cout << "family of best models (" << to_string(family.method) << ", "
            << family.members.size() << " member"
            << (family.members.size() == 1 ? "" : "s") << "):";
  for (const auto& m : family.members) std::cout << " " << m;
  std::cout << "\n";
}

void warn_if_clamped(bool clamped, double rho) {
  if (clamped)
    std::cerr << "WARNING: fold overlap implies rho >= 1 (2-fold CV); clamped to "
              << rho << ". The compound-symmetric covariance is singular at "
              << "rho = 1, so treat Bayesian results with care.\n";
}

void write_common_artifacts(const ReportBundle& bundle, const RunConfig& config,
                            const fs::path& dir, const std::string& stem) {
  if (config.wants_format("json"))
    write_file(dir / (stem + ".json"), emit_report(bundle, ReportFormat::json));
  if (config.wants_format("md"))
    write_file(dir / (stem + ".md"), emit_report(bundle, ReportFormat::markdown));
  if (config.wants_format("svg")) {
    if (bundle.friedman && bundle.friedman->posthoc)
      write_file(dir / "cd_diagram.svg",
                 cd_diagram(bundle.friedman->avg_ranks, bundle.friedman->posthoc->cd,
                            bundle.models));
    if (bundle.bayes) {
      const auto order = performance_order(bundle.overall_means, true);
      write_file(dir / "windowpane.svg", windowpane(bundle.bayes->matrix, order));
    }
  }
}

void write_simplex_plots(const PerfTable& table, const RunConfig& config,
                         const BayesConfig& bayes, const fs::path& dir) {
  // Chains are not retained by the matrix pass; per-pair seeds make this
  // recomputation reproduce the same posteriors exactly.
  for (std::size_t i = 0; i < table.n_models(); ++i) {
    for (std::size_t j = i + 1; j < table.n_models(); ++j) {
      const std::string& x = table.models()[i];
      const std::string& y = table.models()[j];
      const PairPosterior pp = compare_pair(table, x, y, bayes);
      const auto triples = posterior_simplex_samples(*pp.chains, bayes.rope, 2000);
      std::vector<SimplexPoint> points;
      points.reserve(triples.size());
      for (const Theta& t : triples)
        points.push_back({t.p_left, t.p_rope, t.p_right});
      write_file(dir / ("simplex_" + sanitize(x) + "_vs_" + sanitize(y) + ".svg"),
                 simplex_plot(points, bayes.rope, x + " vs " + y));
    }
  }
}

int cmd_validate(const RunConfig& config) {
  const LoadedTable loaded = load_table(config);
  const PerfTable& table = loaded.table;
  std::cout << "valid complete grid\n"
            << "  datasets: " << table.n_datasets() << "\n"
            << "  models:   " << table.n_models() << "\n"
            << "  folds:    " << table.n_folds() << "\n"
            << "  metric:   " << table.metric_name()
            << (table.bounded_unit_interval() ? " (bounded [0,1])" : "") << "\n"
            << "  sha256:   " << loaded.sha256 << "\n";
  return kExitOk;
}

int cmd_method(const RunConfig& config, const MethodSelection& methods,
               const std::string& stem) {
  const LoadedTable loaded = load_table(config);
  const fs::path dir = ensure_out_dir(config);

  RunConfig effective = config;
  if (methods.bayes) {
    bool clamped = false;
    const double rho = config.effective_rho(loaded.table, &clamped);
    warn_if_clamped(clamped, rho);
    effective.rho = rho;
  }

  const ReportBundle bundle = run_report(loaded.table, effective, loaded.sha256, methods);
  write_common_artifacts(bundle, effective, dir, stem);

  if (methods.bayes && config.simplex_plots && config.wants_format("svg"))
    write_simplex_plots(loaded.table, effective,
                        make_bayes_config(effective, loaded.table), dir);

  if (bundle.naive) print_family(bundle.naive->family);
  if (bundle.friedman) {
    if (bundle.friedman->family) {
      print_family(*bundle.friedman->family);
    } else {
      std::cout << "family of best models (nhst): undefined - omnibus retained H0 "
                << "(p = " << bundle.friedman->omnibus.p_value
                << " >= alpha = " << effective.alpha << ")\n";
    }
  }
  if (bundle.bayes) {
    print_family(bundle.bayes->family);
    std::cout << "decided pairwise comparisons: "
              << 100.0 * bundle.bayes->matrix.decided_fraction() << "%\n";
  }
  return kExitOk;
}

int cmd_simulate_null(const RunConfig& config, std::size_t n_datasets,
                      std::size_t n_models, std::size_t n_folds, std::size_t runs) {
  const NullCalibration calib =
      run_null_calibration(n_datasets, n_models, n_folds, runs, config.alpha,
                           config.seed);
  nlohmann::json out{{"runs", calib.runs},
                     {"alpha", calib.alpha},
                     {"n_datasets", n_datasets},
                     {"n_models", n_models},
                     {"n_folds", n_folds},
                     {"seed", config.seed},
                     {"friedman_rejection_rate", calib.friedman_rejection_rate},
                     {"naive_unique_best_rate", calib.naive_unique_best_rate}};
  const fs::path dir = ensure_out_dir(config);
  write_file(dir / "null_calibration.json", out.dump(2) + "\n");
  std::cout << "friedman rejection rate: " << calib.friedman_rejection_rate << "\n"
            << "naive unique-best rate:  " << calib.naive_unique_best_rate << "\n";
  return kExitOk;
}

int cmd_simulate_coverage(const RunConfig& config, const GenSpec& spec,
                          std::size_t runs) {
  CoverageConfig coverage;
  coverage.spec = spec;
  coverage.runs = runs;
  coverage.mcmc = config.mcmc;
  coverage.rope = config.rope;
  coverage.threshold = config.threshold;
  coverage.seed = config.seed;
  const CoverageSummary summary = coverage_experiment(coverage);

  nlohmann::json out{{"runs", summary.runs},
                     {"sampler_failures", summary.sampler_failures},
                     {"ci_coverage_90", summary.ci_coverage_90},
                     {"decided_fraction", summary.decided_fraction},
                     {"mean_p_rope", summary.mean_p_rope},
                     {"rhat_ok_fraction", summary.rhat_ok_fraction},
                     {"true_mu0", spec.mu_0},
                     {"true_sigma0", spec.sigma_0},
                     {"n_datasets", spec.n_datasets},
                     {"n_folds", spec.n_folds},
                     {"rho", spec.rho},
                     {"seed", config.seed}};
  const fs::path dir = ensure_out_dir(config);
  write_file(dir / "coverage.json", out.dump(2) + "\n");
  std::cout << "90% CI coverage of mu0: " << summary.ci_coverage_90 << "\n"
            << "decided fraction:       " << summary.decided_fraction << "\n"
            << "rhat <= 1.05 fraction:  " << summary.rhat_ok_fraction << "\n";
  return kExitOk;
}

void add_common_options(CLI::App* cmd, RunConfig& config, std::string& columns_spec,
                        std::string& config_path) {
  cmd->add_option("--config", config_path,
                  "key = value config file (defaults; flags override)");
  cmd->add_option("--input", config.input_path, "fold-level results CSV");
  cmd->add_option("--columns", columns_spec,
                  "value,resample,dataset,model column names; dataset may join "
                  "several columns with '+'");
  cmd->add_option("--alpha", config.alpha, "NHST significance level");
  cmd->add_option("--rope", config.rope, "ROPE half-width on metric differences");
  cmd->add_option("--threshold", config.threshold, "Bayesian decision threshold");
  cmd->add_option("--rho", config.rho, "fold-overlap correlation n_test/n_train");
  cmd->add_option("--cv-train-frac", config.cv_train_frac,
                  "training fraction per fold (alternative to --rho)");
  cmd->add_option("--chains", config.mcmc.chains, "MCMC chains");
  cmd->add_option("--draws", config.mcmc.total_draws, "total retained draws");
  cmd->add_option("--burn-in", config.mcmc.burn_in, "burn-in sweeps per chain");
  cmd->add_option("--seed", config.seed, "master RNG seed (default: MODELCMP_SEED)");
  cmd->add_option("--out", config.out_dir, "output directory");
  cmd->add_option("--format", config.formats, "output formats (json, md, svg)")
      ->delimiter(',');
  cmd->add_option("--jobs", config.jobs, "parallel pairwise comparisons (0 = cores)");
  cmd->add_flag("--force-posthoc", config.force_posthoc,
                "run the Nemenyi post-hoc even when the omnibus retains H0");
  cmd->add_flag("--simplex-plots", config.simplex_plots,
                "emit a posterior simplex SVG per pair (bayes/report)");
}

void apply_columns_spec(const std::string& spec, ColumnMapping& columns) {
  if (spec.empty()) return;
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) parts.push_back(part);
  if (parts.size() != 4)
    throw ConfigError("--columns needs exactly 4 comma-separated names");
  columns.value = parts[0];
  columns.resample = parts[1];
  columns.dataset_cols.clear();
  std::stringstream ds(parts[2]);
  while (std::getline(ds, part, '+')) columns.dataset_cols.push_back(part);
  columns.model = parts[3];
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  if (const char* env_seed = std::getenv("MODELCMP_SEED")) {
    char* end = nullptr;
    config.seed = std::strtoull(env_seed, &end, 10);
  }

  // A config file provides defaults; explicit flags override them.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        std::ifstream in(argv[i + 1]);
        if (!in) {
          std::cerr << "error: cannot open config file " << argv[i + 1] << "\n";
          return kExitIo;
        }
        RunConfig from_file = parse_config_file(in);
        from_file.seed = from_file.seed ? from_file.seed : config.seed;
        config = from_file;
      } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
      }
    }
  }

  CLI::App app{"modelcmp: evaluate and compare predictive models across datasets "
               "from fold-level cross-validation results"};
  app.set_version_flag("--version", std::string("modelcmp ") + kVersion);
  app.require_subcommand(1);

  std::string columns_spec;
  std::string config_path;
  auto* validate = app.add_subcommand("validate", "check the input grid");
  auto* naive = app.add_subcommand("naive", "naive-average evaluation");
  auto* friedman = app.add_subcommand("friedman", "Friedman + Nemenyi evaluation");
  auto* bayes = app.add_subcommand("bayes", "Bayesian hierarchical evaluation");
  auto* report = app.add_subcommand("report", "all three methods side by side");
  for (CLI::App* cmd : {validate, naive, friedman, bayes, report})
    add_common_options(cmd, config, columns_spec, config_path);

  auto* simulate = app.add_subcommand("simulate", "synthetic calibration runs");
  simulate->require_subcommand(1);
  std::size_t sim_datasets = 20, sim_models = 5, sim_folds = 10, sim_runs = 1000;
  GenSpec gen_spec;
  auto* sim_null = simulate->add_subcommand("null", "Type-I error calibration");
  sim_null->add_option("--n-datasets", sim_datasets, "datasets per table");
  sim_null->add_option("--n-models", sim_models, "models per table");
  sim_null->add_option("--n-folds", sim_folds, "fold-replicates per table");
  sim_null->add_option("--runs", sim_runs, "number of null tables");
  add_common_options(sim_null, config, columns_spec, config_path);

  auto* sim_cov = simulate->add_subcommand("coverage", "credible-interval coverage");
  std::size_t cov_runs = 200;
  sim_cov->add_option("--runs", cov_runs, "number of synthetic experiments");
  sim_cov->add_option("--n-datasets", gen_spec.n_datasets, "datasets per run");
  sim_cov->add_option("--n-folds", gen_spec.n_folds, "folds per run");
  sim_cov->add_option("--mu0", gen_spec.mu_0, "true average difference");
  sim_cov->add_option("--sigma0", gen_spec.sigma_0, "true between-dataset scale");
  sim_cov->add_option("--nu", gen_spec.nu, "true t degrees of freedom");
  sim_cov->add_option("--sigma-scale", gen_spec.sigma_i_scale,
                      "within-dataset noise scale");
  sim_cov->add_option("--gen-rho", gen_spec.rho, "generative fold correlation");
  add_common_options(sim_cov, config, columns_spec, config_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForVersion")
      return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    apply_columns_spec(columns_spec, config.columns);
    config.validate();

    if (*validate) return cmd_validate(config);
    if (*naive) return cmd_method(config, {true, false, false}, "naive");
    if (*friedman) return cmd_method(config, {false, true, false}, "friedman");
    if (*bayes) return cmd_method(config, {false, false, true}, "bayes");
    if (*report) return cmd_method(config, {true, true, true}, "report");
    if (*sim_null)
      return cmd_simulate_null(config, sim_datasets, sim_models, sim_folds, sim_runs);
    if (*sim_cov) {
      gen_spec.rho = config.rho.value_or(gen_spec.rho);
      return cmd_simulate_coverage(config, gen_spec, cov_runs);
    }
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const TieError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
