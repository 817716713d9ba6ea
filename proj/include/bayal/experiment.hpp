#ifndef BAYAL_EXPERIMENT_HPP_
#define BAYAL_EXPERIMENT_HPP_

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bayal/eval.hpp"

namespace bayal {

inline constexpr const char* kVersion = "0.1.0";

/// All knobs of one experiment run. Values here are the resolved state after
/// defaults, config file and command line have been merged.
struct ExperimentConfig {
  std::string scenario{"synthetic"};
  std::vector<std::string> methods{"proposed", "adsl"};
  int n0{0};
  int budget{30};
  double omega{0.5};
  double gamma{0.5};
  Index m_prior{1000};
  int reps{100};
  Index k_cap{0};  // 0 = 4*(p+1)
  Index k0{20};
  Seed seed{1};
  std::string adsl_estimator{"mle"};
  int points_per_level{5};
  int levels{19};
  double alpha_step{0.05};
  double level_skew{1.0};
  int grid_points{61};
  std::string bupa_path;
  std::string wdbc_path;
  std::string output_dir;
};

/// Carries the full validation report; nothing is written when this throws.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string s = "invalid configuration:";
    for (const auto& e : errors) s += "\n  - " + e;
    return s;
  }
  std::vector<std::string> errors_;
};

inline std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> errors;
  if (c.scenario != "synthetic" && c.scenario != "bupa" && c.scenario != "wdbc") {
    errors.push_back("scenario must be one of synthetic|bupa|wdbc, got '" + c.scenario + "'");
  }
  if (c.methods.empty()) errors.push_back("methods must not be empty");
  for (const auto& m : c.methods) {
    if (m != "proposed" && m != "adsl") {
      errors.push_back("unknown method '" + m + "' (expected proposed or adsl)");
    }
  }
  if (c.budget < 1) errors.push_back("budget must be >= 1");
  if (c.n0 < 0) errors.push_back("n0 must be >= 0");
  if (!(c.omega > 0.0 && c.omega < 1.0)) errors.push_back("omega must lie in (0,1)");
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) errors.push_back("gamma must lie in (0,1)");
  if (c.m_prior < 1) errors.push_back("m_prior must be >= 1");
  if (c.reps < 1) errors.push_back("reps must be >= 1");
  if (c.k_cap < 0) errors.push_back("k_cap must be >= 0 (0 selects the default)");
  if (c.k0 < 1) errors.push_back("k0 must be >= 1");
  if (c.adsl_estimator != "mle" && c.adsl_estimator != "map") {
    errors.push_back("adsl_estimator must be mle or map, got '" + c.adsl_estimator + "'");
  }
  if (c.points_per_level < 1) errors.push_back("points_per_level must be >= 1");
  if (c.levels < 1) errors.push_back("levels must be >= 1");
  if (!(c.alpha_step > 0.0) || !(c.alpha_step * c.levels < 1.0)) {
    errors.push_back("alpha_step must be positive with alpha_step*levels < 1");
  }
  if (!(c.level_skew > 0.0)) errors.push_back("level_skew must be positive");
  if (c.grid_points < 2) errors.push_back("grid_points must be >= 2");
  if (c.scenario == "synthetic") {
    const long long n = static_cast<long long>(c.points_per_level) * c.levels;
    if (c.n0 + c.budget > n) {
      errors.push_back("n0 + budget exceeds the synthetic pool size " + std::to_string(n));
    }
  }
  if (c.scenario == "bupa" && c.bupa_path.empty()) {
    errors.push_back("scenario bupa requires bupa_path");
  }
  if (c.scenario == "wdbc" && c.wdbc_path.empty()) {
    errors.push_back("scenario wdbc requires wdbc_path");
  }
  return errors;
}

inline std::string resolve_output_dir(const ExperimentConfig& c) {
  if (!c.output_dir.empty()) return c.output_dir;
  if (const char* env = std::getenv("BAYAL_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "bayal_out";
}

inline std::vector<std::string> parse_methods_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(csv);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

/// Flat key=value config format, one key per line, '#' comments. Returned in
/// file order; malformed lines throw a ConfigError naming them.
inline std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path});
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<std::string> errors;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto strip = [](const std::string& s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    const std::string stripped = strip(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      errors.push_back(path + ":" + std::to_string(line_no) + ": expected key=value");
      continue;
    }
    entries.emplace_back(strip(stripped.substr(0, eq)), strip(stripped.substr(eq + 1)));
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return entries;
}

/// Applies one config-file entry. Returns an error string for unknown keys or
/// unparsable values, empty on success.
inline std::string apply_config_entry(ExperimentConfig& c, const std::string& key,
                                      const std::string& value) {
  try {
    if (key == "scenario") c.scenario = value;
    else if (key == "methods") c.methods = parse_methods_csv(value);
    else if (key == "n0") c.n0 = std::stoi(value);
    else if (key == "budget") c.budget = std::stoi(value);
    else if (key == "omega") c.omega = std::stod(value);
    else if (key == "gamma") c.gamma = std::stod(value);
    else if (key == "m-prior") c.m_prior = std::stol(value);
    else if (key == "reps") c.reps = std::stoi(value);
    else if (key == "k-cap") c.k_cap = std::stol(value);
    else if (key == "k0") c.k0 = std::stol(value);
    else if (key == "seed") c.seed = std::stoull(value);
    else if (key == "adsl-estimator") c.adsl_estimator = value;
    else if (key == "points-per-level") c.points_per_level = std::stoi(value);
    else if (key == "levels") c.levels = std::stoi(value);
    else if (key == "alpha-step") c.alpha_step = std::stod(value);
    else if (key == "level-skew") c.level_skew = std::stod(value);
    else if (key == "grid-points") c.grid_points = std::stoi(value);
    else if (key == "bupa-path") c.bupa_path = value;
    else if (key == "wdbc-path") c.wdbc_path = value;
    else if (key == "output-dir") c.output_dir = value;
    else return "unknown config key '" + key + "'";
  } catch (const std::exception&) {
    return "cannot parse value '" + value + "' for config key '" + key + "'";
  }
  return "";
}

/// Merges a config file into c, skipping keys the command line already set
/// (flags override file values override defaults).
inline void merge_config_file(ExperimentConfig& c, const std::string& path,
                              const std::function<bool(const std::string&)>& given_on_cli) {
  std::vector<std::string> errors;
  for (const auto& [key, value] : read_config_file(path)) {
    if (given_on_cli(key)) continue;
    if (std::string err = apply_config_entry(c, key, value); !err.empty()) {
      errors.push_back(std::move(err));
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

namespace detail {

inline ThetaParams default_theta_true() {
  ThetaParams t;
  t.mu = 0.5;
  t.sigma = 1.0;
  t.weights = (VectorXd(2) << 0.7, 0.3).finished();
  return t;
}

inline std::vector<MethodSpec> build_methods(const ExperimentConfig& c) {
  std::vector<MethodSpec> methods;
  for (const auto& name : c.methods) {
    MethodSpec m;
    m.label = name;
    m.n0 = c.n0;
    m.budget = c.budget;
    if (name == "proposed") {
      m.kind = MethodKind::kProposed;
      m.rule = ClassifierRule{c.omega, c.gamma};
    } else {
      m.kind = MethodKind::kAdsl;
      m.adsl.k0 = c.k0;
      m.adsl.estimator = c.adsl_estimator == "map" ? AdslEstimator::kMap
                                                   : AdslEstimator::kMleWithMapFallback;
      // ADSL couples the uncertainty level and the cutting point.
      m.adsl.omega = c.gamma;
      m.adsl.gamma = c.gamma;
    }
    methods.push_back(std::move(m));
  }
  return methods;
}

inline ScenarioSpec build_scenario(const ExperimentConfig& c) {
  ScenarioSpec scenario;
  scenario.engine.M_prior = c.m_prior;
  scenario.engine.k_cap = c.k_cap;
  scenario.dist_grid_points = c.grid_points;
  if (c.scenario == "synthetic") {
    SyntheticSpec spec;
    spec.theta_true = default_theta_true();
    spec.points_per_level = c.points_per_level;
    spec.levels = c.levels;
    spec.alpha_step = c.alpha_step;
    spec.level_skew = c.level_skew;
    scenario.synthetic = spec;
    scenario.compute_dist = true;
    scenario.dist_level = c.omega;
  } else {
    const auto [pool, meta] = c.scenario == "bupa"
                                  ? load_dataset(c.bupa_path, DatasetFormat::kBupa)
                                  : load_dataset(c.wdbc_path, DatasetFormat::kWdbc);
    if (c.n0 + c.budget > pool.N()) {
      throw ConfigError({"n0 + budget exceeds the dataset size " + std::to_string(pool.N())});
    }
    scenario.fixed_pool = pool;
    scenario.compute_dist = false;
  }
  return scenario;
}

inline void write_manifest(const ExperimentConfig& c, const ReplicationResults& results,
                           const std::vector<Seed>& seeds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_manifest: cannot open " + path);
  out << "# bayal run manifest (loadable via --config)\n";
  out << "# version " << kVersion << "\n";
  out << "scenario=" << c.scenario << "\n";
  out << "methods=";
  for (std::size_t i = 0; i < c.methods.size(); ++i) {
    out << (i ? "," : "") << c.methods[i];
  }
  out << "\n";
  out << "n0=" << c.n0 << "\n";
  out << "budget=" << c.budget << "\n";
  out << "omega=" << format_g12(c.omega) << "\n";
  out << "gamma=" << format_g12(c.gamma) << "\n";
  out << "m-prior=" << c.m_prior << "\n";
  out << "reps=" << c.reps << "\n";
  out << "k-cap=" << c.k_cap << "\n";
  out << "k0=" << c.k0 << "\n";
  out << "seed=" << c.seed << "\n";
  out << "adsl-estimator=" << c.adsl_estimator << "\n";
  out << "points-per-level=" << c.points_per_level << "\n";
  out << "levels=" << c.levels << "\n";
  out << "alpha-step=" << format_g12(c.alpha_step) << "\n";
  out << "level-skew=" << format_g12(c.level_skew) << "\n";
  out << "grid-points=" << c.grid_points << "\n";
  if (!c.bupa_path.empty()) out << "bupa-path=" << c.bupa_path << "\n";
  if (!c.wdbc_path.empty()) out << "wdbc-path=" << c.wdbc_path << "\n";
  out << "output-dir=" << resolve_output_dir(c) << "\n";
  out << "# replication seeds:";
  for (Seed s : seeds) out << ' ' << s;
  out << "\n";
  out << "# replications used: " << results.replications_used << " of "
      << results.replications_requested << "\n";
  for (const Exclusion& e : results.exclusions) {
    out << "# excluded replication " << e.replication << " (" << e.method
        << "): " << e.reason << "\n";
  }
}

}  // namespace detail

struct ExperimentOutput {
  std::string records_csv;
  std::string curves_csv;
  std::string curve_table;
  std::string manifest;
  ReplicationResults results;
};

/// Validates, runs the configured study, and writes the per-replication
/// records, the aggregated curves, a plot-ready table and a manifest that
/// reproduces the run byte for byte when fed back through --config.
inline ExperimentOutput run_experiment(const ExperimentConfig& config) {
  if (auto errors = validate_config(config); !errors.empty()) {
    throw ConfigError(std::move(errors));
  }
  const ScenarioSpec scenario = detail::build_scenario(config);
  const std::vector<MethodSpec> methods = detail::build_methods(config);
  const std::vector<Seed> seeds = default_replication_seeds(config.seed, config.reps);

  ExperimentOutput out;
  out.results = run_replications(scenario, methods, seeds);

  const std::filesystem::path dir = resolve_output_dir(config);
  std::filesystem::create_directories(dir);
  out.records_csv = (dir / "records.csv").string();
  out.curves_csv = (dir / "curves.csv").string();
  out.curve_table = (dir / "curves.dat").string();
  out.manifest = (dir / "manifest.txt").string();
  write_records_csv(out.results.records, out.records_csv);
  write_curves_csv(out.results.curves, out.curves_csv);
  write_curve_table(out.results.curves, out.curve_table);
  detail::write_manifest(config, out.results, seeds, out.manifest);
  return out;
}

// ---------------------------------------------------------------------------
// Plot emission
// ---------------------------------------------------------------------------

struct ParsedCurves {
  std::vector<LearningCurve> curves;
};

inline ParsedCurves read_curves_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_curves_csv: cannot open " + path);
  ParsedCurves parsed;
  std::string line;
  std::getline(in, line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 6) {
      throw std::runtime_error("read_curves_csv: bad row at line " + std::to_string(line_no));
    }
    CurvePoint pt;
    pt.stage = static_cast<int>(detail::parse_number(fields[1], line_no));
    pt.n_labeled = static_cast<Index>(detail::parse_number(fields[2], line_no));
    pt.mean_error = detail::parse_number(fields[3], line_no);
    if (!fields[4].empty()) pt.mean_dist = detail::parse_number(fields[4], line_no);
    pt.replications = static_cast<int>(detail::parse_number(fields[5], line_no));
    LearningCurve* curve = nullptr;
    for (auto& c : parsed.curves) {
      if (c.method == fields[0]) curve = &c;
    }
    if (curve == nullptr) {
      parsed.curves.push_back(LearningCurve{fields[0], {}});
      curve = &parsed.curves.back();
    }
    curve->points.push_back(pt);
  }
  return parsed;
}

/// Writes self-contained gnuplot scripts (error vs n, and distance vs n when
/// present) next to the given output directory. Deterministic in its inputs.
inline std::vector<std::string> emit_plots(const std::string& curves_csv,
                                           const std::string& out_dir) {
  const ParsedCurves parsed = read_curves_csv(curves_csv);
  if (parsed.curves.empty()) {
    throw std::runtime_error("emit_plots: no data in " + curves_csv);
  }
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;

  auto write_script = [&](const std::string& name, const std::string& ylabel,
                          bool use_dist) -> std::string {
    const std::string path = (std::filesystem::path(out_dir) / name).string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_plots: cannot open " + path);
    out << "# generated by bayal " << kVersion << "\n";
    out << "set terminal pngcairo size 900,600\n";
    out << "set output '" << name.substr(0, name.size() - 3) << ".png'\n";
    out << "set xlabel 'labeled points n'\n";
    out << "set ylabel '" << ylabel << "'\n";
    out << "set key top right\n";
    for (const LearningCurve& c : parsed.curves) {
      out << "$" << c.method << " << EOD\n";
      for (const CurvePoint& pt : c.points) {
        if (use_dist && !pt.mean_dist.has_value()) continue;
        out << pt.n_labeled << ' '
            << format_g12(use_dist ? *pt.mean_dist : pt.mean_error) << '\n';
      }
      out << "EOD\n";
    }
    out << "plot ";
    for (std::size_t i = 0; i < parsed.curves.size(); ++i) {
      if (i) out << ", ";
      out << "$" << parsed.curves[i].method << " using 1:2 with linespoints title '"
          << parsed.curves[i].method << "'";
    }
    out << "\n";
    return path;
  };

  written.push_back(write_script("error_vs_n.gp", "mean misclassification error", false));
  bool any_dist = false;
  for (const auto& c : parsed.curves) {
    for (const auto& pt : c.points) any_dist = any_dist || pt.mean_dist.has_value();
  }
  if (any_dist) {
    written.push_back(write_script("dist_vs_n.gp", "mean boundary distance", true));
  }
  return written;
}

}  // namespace bayal

#endif  // BAYAL_EXPERIMENT_HPP_
