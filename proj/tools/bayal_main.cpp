// Command-line harness around the experiment runner: configure a study,
// run it to CSV artifacts, and render plot scripts from curve files.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bayal/data.hpp"
#include "bayal/experiment.hpp"

namespace {

void print_error_report(const std::vector<std::string>& errors) {
  nlohmann::json report;
  report["status"] = "error";
  report["errors"] = errors;
  std::cerr << report.dump(2) << std::endl;
}

void add_run_options(CLI::App& app, bayal::ExperimentConfig& config, std::string& methods_csv) {
  app.add_option("--scenario", config.scenario, "synthetic|bupa|wdbc")
      ->capture_default_str();
  app.add_option("--methods", methods_csv, "comma list of proposed,adsl")
      ->capture_default_str();
  app.add_option("--n0", config.n0, "warm-start size")->capture_default_str();
  app.add_option("--budget", config.budget, "points to select sequentially")
      ->capture_default_str();
  app.add_option("--omega", config.omega, "uncertainty center")->capture_default_str();
  app.add_option("--gamma", config.gamma, "classification cutting point")
      ->capture_default_str();
  app.add_option("--m-prior", config.m_prior, "prior Monte-Carlo pool size")
      ->capture_default_str();
  app.add_option("--reps", config.reps, "replication count")->capture_default_str();
  app.add_option("--k-cap", config.k_cap, "candidate-set cap (0 = 4(p+1))")
      ->capture_default_str();
  app.add_option("--k0", config.k0, "ADSL fixed candidate count")->capture_default_str();
  app.add_option("--seed", config.seed, "base seed")->capture_default_str();
  app.add_option("--adsl-estimator", config.adsl_estimator, "mle|map")
      ->capture_default_str();
  app.add_option("--points-per-level", config.points_per_level,
                 "synthetic points per probability level")
      ->capture_default_str();
  app.add_option("--levels", config.levels, "synthetic probability levels")
      ->capture_default_str();
  app.add_option("--alpha-step", config.alpha_step,
                 "synthetic level probability increment")
      ->capture_default_str();
  app.add_option("--level-skew", config.level_skew,
                 "curvature of the level-probability grid (1 = even)")
      ->capture_default_str();
  app.add_option("--grid-points", config.grid_points, "boundary metric grid size")
      ->capture_default_str();
  app.add_option("--bupa-path", config.bupa_path, "liver-disorders CSV path");
  app.add_option("--wdbc-path", config.wdbc_path, "breast-cancer CSV path");
  app.add_option("--output-dir", config.output_dir,
                 "artifact directory (fallback: $BAYAL_OUTPUT_DIR, then ./bayal_out)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bayal: pool-based active learning with Bayesian D-optimal selection"};
  app.require_subcommand(1);

  bayal::ExperimentConfig config;
  std::string methods_csv = "proposed,adsl";
  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run a configured experiment");
  add_run_options(*run, config, methods_csv);
  run->add_option("--config", config_path, "key=value config file; flags override it");

  std::string curves_path;
  std::string plot_out = ".";
  CLI::App* plot = app.add_subcommand("plot", "emit gnuplot scripts from a curves CSV");
  plot->add_option("--curves", curves_path, "curves.csv from a run")->required();
  plot->add_option("--out", plot_out, "directory for plot scripts")->capture_default_str();

  bayal::SyntheticSpec synth_spec;
  synth_spec.theta_true.mu = 0.5;
  synth_spec.theta_true.sigma = 1.0;
  synth_spec.theta_true.weights = (bayal::VectorXd(2) << 0.7, 0.3).finished();
  std::string synth_out = "pool.csv";
  CLI::App* synth = app.add_subcommand("synth", "export a synthetic pool as CSV");
  synth->add_option("--out", synth_out, "output CSV path")->capture_default_str();
  synth->add_option("--points-per-level", synth_spec.points_per_level)->capture_default_str();
  synth->add_option("--levels", synth_spec.levels)->capture_default_str();
  synth->add_option("--alpha-step", synth_spec.alpha_step)->capture_default_str();
  synth->add_option("--level-skew", synth_spec.level_skew)->capture_default_str();
  synth->add_option("--seed", synth_spec.seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      config.methods = bayal::parse_methods_csv(methods_csv);
      if (!config_path.empty()) {
        // Command-line flags take precedence over config-file values, which
        // take precedence over the built-in defaults.
        auto given = [&](const std::string& key) {
          const std::string flag = "--" + key;
          return run->get_option_no_throw(flag) != nullptr && run->count(flag) > 0;
        };
        bayal::merge_config_file(config, config_path, given);
      }
      const bayal::ExperimentOutput out = bayal::run_experiment(config);
      std::cout << "records: " << out.records_csv << "\n"
                << "curves:  " << out.curves_csv << "\n"
                << "table:   " << out.curve_table << "\n"
                << "manifest:" << out.manifest << "\n"
                << "replications used: " << out.results.replications_used << " of "
                << out.results.replications_requested << "\n";
      for (const auto& e : out.results.exclusions) {
        std::cout << "excluded replication " << e.replication << ": " << e.reason << "\n";
      }
    } else if (plot->parsed()) {
      for (const auto& path : bayal::emit_plots(curves_path, plot_out)) {
        std::cout << "wrote " << path << "\n";
      }
    } else if (synth->parsed()) {
      bayal::export_pool_csv(bayal::generate_synthetic(synth_spec), synth_out);
      std::cout << "wrote " << synth_out << "\n";
    }
  } catch (const bayal::ConfigError& e) {
    print_error_report(e.errors());
    return 2;
  } catch (const std::exception& e) {
    print_error_report({e.what()});
    return 1;
  }
  return 0;
}
