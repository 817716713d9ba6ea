#ifndef BAYAL_EVAL_HPP_
#define BAYAL_EVAL_HPP_

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bayal/baseline.hpp"
#include "bayal/data.hpp"
#include "bayal/design.hpp"

namespace bayal {

struct ErrorCounts {
  Index false_positives{};
  Index false_negatives{};
  Index total{};
};

inline double weighted_error(const ErrorCounts& c, double gamma) {
  return (gamma * static_cast<double>(c.false_positives) +
          (1.0 - gamma) * static_cast<double>(c.false_negatives)) /
         static_cast<double>(c.total);
}

/// Cost-weighted misclassification error over the whole pool (or only the
/// currently unlabeled remainder): [gamma FP + (1-gamma) FN] / N.
inline double misclassification_error(const BetaVector& beta, const ClassifierRule& rule,
                                      const Pool& pool, bool unlabeled_only = false) {
  rule.validate();
  if (pool.N() == 0) throw std::invalid_argument("misclassification_error: empty pool");
  ErrorCounts counts;
  for (Index i = 0; i < pool.N(); ++i) {
    if (unlabeled_only && pool.is_labeled(i)) continue;
    ++counts.total;
    const int predicted = classify(predict_prob(beta, VectorXd(pool.row(i))), rule);
    const int truth = pool.true_labels()[i];
    if (predicted == 1 && truth == 0) ++counts.false_positives;
    if (predicted == 0 && truth == 1) ++counts.false_negatives;
  }
  if (counts.total == 0) throw std::invalid_argument("misclassification_error: nothing to score");
  return weighted_error(counts, rule.gamma);
}

/// Evenly spaced points on the true probability-level boundary, x1 running
/// over [-3, 3].
inline MatrixXd true_boundary_grid(const ThetaParams& theta_true, double level,
                                   int grid_points) {
  theta_true.validate();
  if (theta_true.p() != 2) {
    throw std::invalid_argument("true_boundary_grid: defined for two features");
  }
  if (grid_points < 2) throw std::invalid_argument("true_boundary_grid: need >= 2 points");
  const double target = theta_true.mu + theta_true.sigma * logit(level);
  MatrixXd T(grid_points, 2);
  for (int i = 0; i < grid_points; ++i) {
    const double x1 = -3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    T(i, 0) = x1;
    T(i, 1) = (target - theta_true.weights[0] * x1) / theta_true.weights[1];
  }
  return T;
}

/// Sum of squared perpendicular distances from the given boundary points to
/// the estimated boundary.
inline double boundary_dist_sum(const BetaVector& beta_hat, double level, const MatrixXd& T) {
  double acc = 0.0;
  for (Index i = 0; i < T.rows(); ++i) {
    const double d = boundary_distance<double>(beta_hat, level, VectorXd(T.row(i)));
    acc += d * d;
  }
  return acc;
}

/// The per-run distance measure whose replication average is the distance
/// performance metric.
inline double boundary_dist_metric(const BetaVector& beta_hat, const ThetaParams& theta_true,
                                   double level, int grid_points) {
  return boundary_dist_sum(beta_hat, level, true_boundary_grid(theta_true, level, grid_points));
}

// ---------------------------------------------------------------------------
// Replication machinery
// ---------------------------------------------------------------------------

enum class MethodKind { kProposed, kAdsl };

struct MethodSpec {
  MethodKind kind{MethodKind::kProposed};
  std::string label{"proposed"};
  ClassifierRule rule{};
  AdslConfig adsl{};
  int n0{0};
  int budget{30};
};

/// What varies across replications: synthetic scenarios draw a fresh pool
/// per replication, fixed-pool scenarios rerandomize only the warm start.
struct ScenarioSpec {
  std::optional<SyntheticSpec> synthetic;
  std::optional<Pool> fixed_pool;
  double alpha_l{0.05};
  double alpha_u{0.95};
  EngineConfig engine{};
  int dist_grid_points{61};
  bool compute_dist{false};
  double dist_level{0.5};
};

struct RecordRow {
  std::string method;
  int replication{};
  int stage{};
  Index n_labeled{};
  double error{};
  std::optional<double> dist;
  Index k_n{};
  bool fallback_used{};
};

struct CurvePoint {
  int stage{};
  Index n_labeled{};
  double mean_error{};
  std::optional<double> mean_dist;
  int replications{};
};

struct LearningCurve {
  std::string method;
  std::vector<CurvePoint> points;
};

struct Exclusion {
  int replication{};
  std::string method;
  std::string reason;
};

struct ReplicationResults {
  std::vector<LearningCurve> curves;
  std::vector<RecordRow> records;
  std::vector<Exclusion> exclusions;
  int replications_requested{};
  int replications_used{};
};

namespace detail {

inline Pool make_pool(const ScenarioSpec& scenario, Seed rep_seed) {
  if (scenario.synthetic.has_value()) {
    SyntheticSpec spec = *scenario.synthetic;
    spec.seed = derive_seed(rep_seed, Stream::kPool);
    return generate_synthetic(spec);
  }
  if (!scenario.fixed_pool.has_value()) {
    throw std::invalid_argument("ScenarioSpec: neither synthetic nor fixed pool set");
  }
  return *scenario.fixed_pool;
}

inline RunResult dispatch(const MethodSpec& method, Pool pool, const PriorSpec& prior,
                          const EngineConfig& engine, Seed seed) {
  if (method.kind == MethodKind::kProposed) {
    return run_active_learning(std::move(pool), prior, method.rule, method.budget,
                               method.n0, engine, seed);
  }
  return run_adsl(std::move(pool), prior, method.adsl, method.budget, method.n0, engine, seed);
}

inline void append_rows(std::vector<RecordRow>& rows, const MethodSpec& method,
                        const ScenarioSpec& scenario, const RunResult& run, int replication) {
  const ClassifierRule rule =
      method.kind == MethodKind::kProposed
          ? method.rule
          : ClassifierRule{method.adsl.omega, method.adsl.gamma};
  auto metric_row = [&](int stage, Index n_labeled, const BetaVector& beta, Index k_n,
                        bool fallback) {
    RecordRow row;
    row.method = method.label;
    row.replication = replication;
    row.stage = stage;
    row.n_labeled = n_labeled;
    row.error = misclassification_error(beta, rule, run.final_pool);
    if (scenario.compute_dist) {
      row.dist = boundary_dist_metric(beta, scenario.synthetic->theta_true,
                                      scenario.dist_level, scenario.dist_grid_points);
    }
    row.k_n = k_n;
    row.fallback_used = fallback;
    rows.push_back(std::move(row));
  };

  metric_row(0, static_cast<Index>(method.n0), run.initial_beta, 0, false);
  for (const StageRecord& rec : run.records) {
    metric_row(rec.stage, static_cast<Index>(method.n0) + rec.stage, rec.beta, rec.k_n,
               rec.fallback_used);
  }
  // A run stopped by saturated probabilities keeps its final classifier for
  // the remaining budget positions so curves stay aligned.
  if (static_cast<int>(run.records.size()) < method.budget) {
    const BetaVector& beta =
        run.records.empty() ? run.initial_beta : run.records.back().beta;
    const Index n_final = static_cast<Index>(method.n0 + static_cast<int>(run.records.size()));
    for (int stage = static_cast<int>(run.records.size()) + 1; stage <= method.budget; ++stage) {
      metric_row(stage, n_final, beta, 0, false);
    }
  }
}

}  // namespace detail

inline std::vector<Seed> default_replication_seeds(Seed base, int count) {
  std::vector<Seed> seeds(static_cast<std::size_t>(count));
  for (int r = 0; r < count; ++r) {
    seeds[static_cast<std::size_t>(r)] =
        derive_seed(derive_seed(base, Stream::kReplication), static_cast<Seed>(r));
  }
  return seeds;
}

/// Runs every method on freshly seeded replications and averages the
/// per-stage metrics pointwise. Methods sharing a replication see the same
/// pool and the same warm-start draw. A replication that raises a degeneracy
/// error anywhere is dropped for all methods and reported.
inline ReplicationResults run_replications(const ScenarioSpec& scenario,
                                           const std::vector<MethodSpec>& methods,
                                           const std::vector<Seed>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("run_replications: need at least one seed");
  if (methods.empty()) throw std::invalid_argument("run_replications: need at least one method");

  ReplicationResults results;
  results.replications_requested = static_cast<int>(seeds.size());

  for (std::size_t r = 0; r < seeds.size(); ++r) {
    const Seed rep_seed = seeds[r];
    std::vector<RecordRow> rep_rows;
    try {
      const Pool pool = detail::make_pool(scenario, rep_seed);
      const PriorSpec prior = elicit_priors(
          pool, scenario.alpha_l, scenario.alpha_u,
          VectorXd::Constant(pool.p(), 1.0 / static_cast<double>(pool.p())));
      for (const MethodSpec& method : methods) {
        const RunResult run =
            detail::dispatch(method, pool, prior, scenario.engine, rep_seed);
        detail::append_rows(rep_rows, method, scenario, run, static_cast<int>(r));
      }
    } catch (const std::exception& e) {
      results.exclusions.push_back({static_cast<int>(r), "all", e.what()});
      continue;
    }
    results.records.insert(results.records.end(), rep_rows.begin(), rep_rows.end());
    ++results.replications_used;
  }

  // Pointwise means, folded in replication order.
  for (const MethodSpec& method : methods) {
    LearningCurve curve;
    curve.method = method.label;
    std::map<int, CurvePoint> by_stage;
    for (const RecordRow& row : results.records) {
      if (row.method != method.label) continue;
      CurvePoint& pt = by_stage[row.stage];
      pt.stage = row.stage;
      pt.n_labeled = static_cast<Index>(method.n0) + row.stage;
      pt.mean_error += row.error;
      if (row.dist.has_value()) {
        pt.mean_dist = pt.mean_dist.value_or(0.0) + *row.dist;
      }
      ++pt.replications;
    }
    for (auto& [stage, pt] : by_stage) {
      pt.mean_error /= static_cast<double>(pt.replications);
      if (pt.mean_dist.has_value()) *pt.mean_dist /= static_cast<double>(pt.replications);
      curve.points.push_back(pt);
    }
    results.curves.push_back(std::move(curve));
  }
  return results;
}

// ---------------------------------------------------------------------------
// CSV persistence
// ---------------------------------------------------------------------------

inline std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline void write_records_csv(const std::vector<RecordRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_records_csv: cannot open " + path);
  out << "method,replication,stage,n_labeled,error,dist,k_n,fallback_used\n";
  for (const RecordRow& r : rows) {
    out << r.method << ',' << r.replication << ',' << r.stage << ',' << r.n_labeled << ','
        << format_g12(r.error) << ',' << (r.dist.has_value() ? format_g12(*r.dist) : "")
        << ',' << r.k_n << ',' << (r.fallback_used ? 1 : 0) << '\n';
  }
}

inline void write_curves_csv(const std::vector<LearningCurve>& curves, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_curves_csv: cannot open " + path);
  out << "method,stage,n_labeled,mean_error,mean_dist,replications\n";
  for (const LearningCurve& c : curves) {
    for (const CurvePoint& pt : c.points) {
      out << c.method << ',' << pt.stage << ',' << pt.n_labeled << ','
          << format_g12(pt.mean_error) << ','
          << (pt.mean_dist.has_value() ? format_g12(*pt.mean_dist) : "") << ','
          << pt.replications << '\n';
    }
  }
}

/// Wide, whitespace-separated table for plotting: one row per stage, one
/// error (and optional distance) column per method.
inline void write_curve_table(const std::vector<LearningCurve>& curves, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_curve_table: cannot open " + path);
  out << "# stage";
  bool any_dist = false;
  for (const LearningCurve& c : curves) {
    out << ' ' << c.method << "_n " << c.method << "_error";
    for (const CurvePoint& pt : c.points) any_dist = any_dist || pt.mean_dist.has_value();
  }
  if (any_dist) {
    for (const LearningCurve& c : curves) out << ' ' << c.method << "_dist";
  }
  out << '\n';
  std::size_t max_points = 0;
  for (const LearningCurve& c : curves) max_points = std::max(max_points, c.points.size());
  for (std::size_t i = 0; i < max_points; ++i) {
    out << (curves.empty() ? 0 : (i < curves[0].points.size() ? curves[0].points[i].stage : 0));
    for (const LearningCurve& c : curves) {
      if (i < c.points.size()) {
        out << ' ' << c.points[i].n_labeled << ' ' << format_g12(c.points[i].mean_error);
      } else {
        out << " nan nan";
      }
    }
    if (any_dist) {
      for (const LearningCurve& c : curves) {
        if (i < c.points.size() && c.points[i].mean_dist.has_value()) {
          out << ' ' << format_g12(*c.points[i].mean_dist);
        } else {
          out << " nan";
        }
      }
    }
    out << '\n';
  }
}

/// Reads back a records CSV; used to recompute curve means independently of
/// the streaming aggregation.
inline std::vector<RecordRow> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_records_csv: cannot open " + path);
  std::vector<RecordRow> rows;
  std::string line;
  std::getline(in, line);  // header
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 8) {
      throw std::runtime_error("read_records_csv: bad row at line " + std::to_string(line_no));
    }
    RecordRow r;
    r.method = fields[0];
    r.replication = static_cast<int>(detail::parse_number(fields[1], line_no));
    r.stage = static_cast<int>(detail::parse_number(fields[2], line_no));
    r.n_labeled = static_cast<Index>(detail::parse_number(fields[3], line_no));
    r.error = detail::parse_number(fields[4], line_no);
    if (!fields[5].empty()) r.dist = detail::parse_number(fields[5], line_no);
    r.k_n = static_cast<Index>(detail::parse_number(fields[6], line_no));
    r.fallback_used = detail::parse_number(fields[7], line_no) != 0.0;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace bayal

#endif  // BAYAL_EVAL_HPP_
