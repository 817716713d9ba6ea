#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bayal/experiment.hpp"

using namespace bayal;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_config(const fs::path& out) {
  ExperimentConfig config;
  config.scenario = "synthetic";
  config.methods = {"proposed", "adsl"};
  config.budget = 3;
  config.reps = 2;
  config.m_prior = 120;
  config.seed = 77;
  config.output_dir = out.string();
  return config;
}

}  // namespace

TEST_CASE("config validation lists every problem and writes nothing") {
  ExperimentConfig config;
  config.scenario = "nope";
  config.methods = {"proposed", "svm"};
  config.budget = 0;
  config.omega = 1.2;
  config.gamma = -0.1;
  config.reps = 0;
  const fs::path out = fresh_dir("bayal_invalid");
  fs::remove_all(out);
  config.output_dir = out.string();

  const auto errors = validate_config(config);
  CHECK(errors.size() >= 6);
  CHECK_THROWS_AS(run_experiment(config), ConfigError);
  CHECK(!fs::exists(out));  // no artifacts on validation failure
}

TEST_CASE("omega outside (0,1) alone is rejected") {
  ExperimentConfig config = tiny_config(fresh_dir("bayal_omega"));
  config.omega = 1.2;
  const auto errors = validate_config(config);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].find("omega") != std::string::npos);
}

TEST_CASE("run_experiment writes the four artifacts") {
  const fs::path out = fresh_dir("bayal_run");
  const ExperimentOutput result = run_experiment(tiny_config(out));
  CHECK(fs::exists(result.records_csv));
  CHECK(fs::exists(result.curves_csv));
  CHECK(fs::exists(result.curve_table));
  CHECK(fs::exists(result.manifest));

  const std::string records = slurp(result.records_csv);
  CHECK(records.rfind("method,replication,stage,n_labeled,error,dist,k_n,fallback_used", 0) ==
        0);
  const std::string curves = slurp(result.curves_csv);
  CHECK(curves.rfind("method,stage,n_labeled,mean_error,mean_dist,replications", 0) == 0);
}

TEST_CASE("same seed reproduces byte-identical CSVs") {
  const fs::path out_a = fresh_dir("bayal_det_a");
  const fs::path out_b = fresh_dir("bayal_det_b");
  ExperimentConfig config = tiny_config(out_a);
  const ExperimentOutput a = run_experiment(config);
  config.output_dir = out_b.string();
  const ExperimentOutput b = run_experiment(config);
  CHECK(slurp(a.records_csv) == slurp(b.records_csv));
  CHECK(slurp(a.curves_csv) == slurp(b.curves_csv));
}

TEST_CASE("rerunning from the manifest reproduces the run byte for byte") {
  const fs::path out = fresh_dir("bayal_manifest");
  const ExperimentOutput first = run_experiment(tiny_config(out));

  // Load the manifest exactly as `run --config <manifest>` would.
  ExperimentConfig config;  // defaults only; every value should come from file
  merge_config_file(config, first.manifest, [](const std::string&) { return false; });
  config.output_dir = fresh_dir("bayal_manifest_replay").string();
  const ExperimentOutput replay = run_experiment(config);
  CHECK(slurp(first.records_csv) == slurp(replay.records_csv));
  CHECK(slurp(first.curves_csv) == slurp(replay.curves_csv));
}

TEST_CASE("config file precedence and error reporting") {
  const fs::path dir = fresh_dir("bayal_cfgfile");
  const fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << "# comment line\nbudget=7\nreps = 4\nomega=0.3  # trailing\n";

  SUBCASE("file values override defaults; cli-claimed keys are skipped") {
    ExperimentConfig config;
    merge_config_file(config, cfg.string(),
                      [](const std::string& key) { return key == "budget"; });
    CHECK(config.budget == 30);  // claimed by the command line, file skipped
    CHECK(config.reps == 4);
    CHECK(config.omega == doctest::Approx(0.3));
  }

  SUBCASE("unknown keys are collected") {
    std::ofstream(cfg) << "budget=7\nbogus=1\n";
    ExperimentConfig config;
    CHECK_THROWS_AS(
        merge_config_file(config, cfg.string(), [](const std::string&) { return false; }),
        ConfigError);
  }

  SUBCASE("malformed lines name their location") {
    std::ofstream(cfg) << "budget\n";
    try {
      ExperimentConfig config;
      merge_config_file(config, cfg.string(), [](const std::string&) { return false; });
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      REQUIRE(e.errors().size() == 1);
      CHECK(e.errors()[0].find(":1:") != std::string::npos);
    }
  }
}

TEST_CASE("output dir falls back to the environment variable") {
  const fs::path out = fresh_dir("bayal_envdir");
  ExperimentConfig config;
  config.output_dir.clear();
  setenv("BAYAL_OUTPUT_DIR", out.string().c_str(), 1);
  CHECK(resolve_output_dir(config) == out.string());
  unsetenv("BAYAL_OUTPUT_DIR");
  CHECK(resolve_output_dir(config) == "bayal_out");
  config.output_dir = "explicit";
  setenv("BAYAL_OUTPUT_DIR", out.string().c_str(), 1);
  CHECK(resolve_output_dir(config) == "explicit");  // flag/config wins
  unsetenv("BAYAL_OUTPUT_DIR");
}

TEST_CASE("emit_plots") {
  const fs::path out = fresh_dir("bayal_plots");
  const ExperimentOutput run = run_experiment(tiny_config(out));

  SUBCASE("two methods produce overlaid curves with a legend") {
    const auto written = emit_plots(run.curves_csv, (out / "plots").string());
    REQUIRE(written.size() == 2);  // error plus distance for synthetic runs
    const std::string script = slurp(written[0]);
    CHECK(script.find("title 'proposed'") != std::string::npos);
    CHECK(script.find("title 'adsl'") != std::string::npos);
    CHECK(script.find("set ylabel 'mean misclassification error'") != std::string::npos);
  }

  SUBCASE("single-method curve plots one line") {
    ExperimentConfig config = tiny_config(fresh_dir("bayal_plots_single"));
    config.methods = {"proposed"};
    const ExperimentOutput single = run_experiment(config);
    const auto written =
        emit_plots(single.curves_csv, (fresh_dir("bayal_plots_single_out")).string());
    const std::string script = slurp(written[0]);
    CHECK(script.find("title 'proposed'") != std::string::npos);
    CHECK(script.find("adsl") == std::string::npos);
  }

  SUBCASE("empty curve file is an explicit no-data error") {
    const fs::path empty = out / "empty.csv";
    std::ofstream(empty) << "method,stage,n_labeled,mean_error,mean_dist,replications\n";
    CHECK_THROWS_WITH_AS(emit_plots(empty.string(), (out / "p2").string()),
                         doctest::Contains("no data"), std::runtime_error);
  }

  SUBCASE("missing input file is an error") {
    CHECK_THROWS(emit_plots((out / "missing.csv").string(), (out / "p3").string()));
  }
}

TEST_CASE("plot determinism") {
  const fs::path out = fresh_dir("bayal_plotdet");
  const ExperimentOutput run = run_experiment(tiny_config(out));
  const auto a = emit_plots(run.curves_csv, (out / "pa").string());
  const auto b = emit_plots(run.curves_csv, (out / "pb").string());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(slurp(a[i]) == slurp(b[i]));
}
