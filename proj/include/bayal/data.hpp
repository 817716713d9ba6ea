#ifndef BAYAL_DATA_HPP_
#define BAYAL_DATA_HPP_

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bayal/math.hpp"
#include "bayal/model.hpp"
#include "bayal/pool.hpp"
#include "bayal/prior.hpp"
#include "bayal/rng.hpp"

namespace bayal {

/// Two-feature synthetic generator: x1 uniform on a sliding window per
/// probability level, x2 solved so that the true model assigns exactly that
/// level, labels Bernoulli at the level.
struct SyntheticSpec {
  ThetaParams theta_true;
  int points_per_level{5};
  int levels{19};
  double a0{-3.0};
  double b0{0.0};
  double step{0.15};
  double alpha_step{0.05};   // level j gets probability alpha_step * j ...
  double level_skew{1.0};    // ... curved through ((j-1)/(levels-1))^level_skew;
                             // 1 keeps the even grid, larger skews mass toward
                             // low probabilities for uneven group sizes
  Seed seed{0};

  Index N() const { return static_cast<Index>(points_per_level) * levels; }

  void validate() const {
    theta_true.validate();
    if (theta_true.p() != 2) {
      throw std::invalid_argument("SyntheticSpec: generator is two-feature");
    }
    if (points_per_level < 1 || levels < 1 || !(step > 0.0)) {
      throw std::invalid_argument("SyntheticSpec: counts must be positive, step > 0");
    }
    if (!(alpha_step > 0.0) || !(alpha_step * levels < 1.0)) {
      throw std::invalid_argument("SyntheticSpec: level probabilities must stay in (0,1)");
    }
    if (!(level_skew > 0.0)) {
      throw std::invalid_argument("SyntheticSpec: level_skew must be positive");
    }
  }

  /// Probability attached to level j (1-based). The default skew of 1 gives
  /// the even grid alpha_step * j.
  double level_alpha(int j) const {
    if (levels == 1) return alpha_step;
    const double lo = alpha_step;
    const double hi = alpha_step * levels;
    const double t = static_cast<double>(j - 1) / static_cast<double>(levels - 1);
    return lo + (hi - lo) * std::pow(t, level_skew);
  }
};

inline Pool generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const double w1 = spec.theta_true.weights[0];
  const double w2 = spec.theta_true.weights[1];
  if (w2 == 0.0) throw std::domain_error("generate_synthetic: degenerate generator (w2 = 0)");

  Rng rng(spec.seed);
  MatrixXd X(spec.N(), 2);
  VectorXi y(spec.N());
  Index row = 0;
  for (int j = 1; j <= spec.levels; ++j) {
    const double alpha = spec.level_alpha(j);
    const double lo = spec.a0 + spec.step * (j - 1);
    const double hi = spec.b0 + spec.step * (j - 1);
    const double target = spec.theta_true.mu + spec.theta_true.sigma * logit(alpha);
    for (int k = 0; k < spec.points_per_level; ++k, ++row) {
      const double x1 = rng.uniform(lo, hi);
      X(row, 0) = x1;
      X(row, 1) = (target - w1 * x1) / w2;
      y[row] = rng.uniform01() < alpha ? 1 : 0;
    }
  }
  return Pool(std::move(X), std::move(y));
}

/// Prior elicitation from the pool geometry: project onto a working weight
/// vector, anchor the extremes of the projection at the given suspicion
/// levels, and use the projection's spread for the location prior.
inline PriorSpec elicit_priors(const Pool& pool, double alpha_l, double alpha_u,
                               const VectorXd& w0) {
  if (!(alpha_l > 0.0 && alpha_l < alpha_u && alpha_u < 1.0)) {
    throw std::invalid_argument("elicit_priors: need 0 < alpha_l < alpha_u < 1");
  }
  if (pool.N() == 0) throw std::invalid_argument("elicit_priors: empty pool");
  if (w0.size() != pool.p()) throw std::invalid_argument("elicit_priors: w0 dimension mismatch");

  const VectorXd z = pool.features() * w0;
  const double z_l = z.minCoeff();
  const double z_u = z.maxCoeff();
  if (!(z_u > z_l)) throw std::runtime_error("elicit_priors: degenerate pool (constant z)");

  PriorSpec prior;
  prior.mu0 = 0.5 * (z_l + z_u);
  prior.sigma0 = (z_u - z_l) / (logit(alpha_u) - logit(alpha_l));
  const double mean = z.mean();
  prior.sigma_mu2 = (z.array() - mean).square().sum() / static_cast<double>(z.size() - 1);
  prior.alpha = VectorXd::Constant(pool.p(), 1.5);
  prior.validate();
  return prior;
}

struct DatasetMeta {
  std::string name;
  Index N{};
  Index p{};
  double positive_fraction{};
  VectorXd feature_means;
  VectorXd feature_sds;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

inline double parse_number(const std::string& s, std::size_t line_no) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                             ": non-numeric field '" + s + "'");
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size()) {
    throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                             ": non-numeric field '" + s + "'");
  }
  return v;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// In-place standardization to zero mean and unit (n-1) standard deviation.
inline void standardize(MatrixXd& X, VectorXd& means, VectorXd& sds) {
  means = X.colwise().mean();
  sds.resize(X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    const double ss = (X.col(j).array() - means[j]).square().sum();
    sds[j] = std::sqrt(ss / static_cast<double>(X.rows() - 1));
    if (!(sds[j] > 0.0)) {
      throw std::runtime_error("standardize: feature " + std::to_string(j) +
                               " has zero variance");
    }
    X.col(j) = (X.col(j).array() - means[j]) / sds[j];
  }
}

inline double point_biserial(const VectorXd& x, const VectorXi& y) {
  const double my = y.cast<double>().mean();
  const double mx = x.mean();
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = static_cast<double>(y[i]) - my;
    cov += dx * dy;
    vx += dx * dx;
    vy += dy * dy;
  }
  if (!(vx > 0.0) || !(vy > 0.0)) return 0.0;
  return cov / std::sqrt(vx * vy);
}

inline std::pair<Pool, DatasetMeta> finalize_dataset(std::string name, MatrixXd X,
                                                     VectorXi y, Index expected_n,
                                                     std::vector<std::string> warnings) {
  DatasetMeta meta;
  meta.name = std::move(name);
  meta.N = X.rows();
  meta.p = X.cols();
  meta.positive_fraction = y.cast<double>().mean();
  meta.warnings = std::move(warnings);
  if (meta.N != expected_n) {
    meta.warnings.push_back("row count " + std::to_string(meta.N) +
                            " differs from the expected " + std::to_string(expected_n));
  }
  // The model assumes each feature relates positively to the response;
  // a negative sample correlation is worth flagging, not fatal.
  for (Index j = 0; j < X.cols(); ++j) {
    if (point_biserial(X.col(j), y) < 0.0) {
      meta.warnings.push_back("feature " + std::to_string(j) +
                              " correlates negatively with the label");
    }
  }
  standardize(X, meta.feature_means, meta.feature_sds);
  return {Pool(std::move(X), std::move(y)), meta};
}

}  // namespace detail

/// Liver-disorders file: mcv, alkphos, sgpt, sgot, gammagt, drinks, selector.
/// The selector value 2 maps to class 1. Features are standardized.
inline std::pair<Pool, DatasetMeta> load_bupa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_bupa: cannot open " + path);
  std::vector<std::array<double, 6>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 7) {
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": expected 7 fields, got " + std::to_string(fields.size()));
    }
    std::array<double, 6> row{};
    for (std::size_t j = 0; j < 6; ++j) row[j] = detail::parse_number(fields[j], line_no);
    const double selector = detail::parse_number(fields[6], line_no);
    rows.push_back(row);
    labels.push_back(selector == 2.0 ? 1 : 0);
  }
  MatrixXd X(static_cast<Index>(rows.size()), 6);
  VectorXi y(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Index j = 0; j < 6; ++j) X(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    y[static_cast<Index>(i)] = labels[i];
  }
  std::vector<std::string> warnings;
  const Index positives = y.sum();
  if (positives != 200) {
    warnings.push_back("selector==2 count " + std::to_string(positives) +
                       " differs from the canonical 200/145 split");
  }
  return detail::finalize_dataset("bupa", std::move(X), std::move(y), 345, std::move(warnings));
}

/// Breast-cancer diagnostic file: id, diagnosis (M/B), then 30 features.
/// Diagnosis M maps to class 1. Features are standardized.
inline std::pair<Pool, DatasetMeta> load_wdbc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_wdbc: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 32) {
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": expected 32 fields, got " + std::to_string(fields.size()));
    }
    const std::string diag = detail::trim(fields[1]);
    if (diag != "M" && diag != "B") {
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": diagnosis must be M or B, got '" + diag + "'");
    }
    std::vector<double> row(30);
    for (std::size_t j = 0; j < 30; ++j) row[j] = detail::parse_number(fields[j + 2], line_no);
    rows.push_back(std::move(row));
    labels.push_back(diag == "M" ? 1 : 0);
  }
  MatrixXd X(static_cast<Index>(rows.size()), 30);
  VectorXi y(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Index j = 0; j < 30; ++j) X(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    y[static_cast<Index>(i)] = labels[i];
  }
  return detail::finalize_dataset("wdbc", std::move(X), std::move(y), 569, {});
}

enum class DatasetFormat { kBupa, kWdbc };

inline std::pair<Pool, DatasetMeta> load_dataset(const std::string& path, DatasetFormat format) {
  return format == DatasetFormat::kBupa ? load_bupa(path) : load_wdbc(path);
}

/// Writes a two-feature pool as x1,x2,y for external inspection.
inline void export_pool_csv(const Pool& pool, const std::string& path) {
  if (pool.p() != 2) throw std::invalid_argument("export_pool_csv: expects two features");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_pool_csv: cannot open " + path);
  out << "x1,x2,y\n";
  char buf[96];
  for (Index i = 0; i < pool.N(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%d\n", pool.features()(i, 0),
                  pool.features()(i, 1), pool.true_labels()[i]);
    out << buf;
  }
}

}  // namespace bayal

#endif  // BAYAL_DATA_HPP_
