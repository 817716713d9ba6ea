#ifndef BAYAL_CRITERIA_HPP_
#define BAYAL_CRITERIA_HPP_

#include <cmath>
#include <vector>

#include "bayal/math.hpp"
#include "bayal/model.hpp"
#include "bayal/prior.hpp"
#include "bayal/types.hpp"

namespace bayal {

inline constexpr double kPivotRelTol = 1e-12;

struct LogDet {
  double value{negative_infinity<double>()};
  bool singular{true};
};

/// Log determinant of a PSD matrix via LDLT. The matrix counts as singular
/// when any pivot falls below kPivotRelTol times the trace, or when the
/// trace itself is not positive; singular maps to value -inf.
inline LogDet logdet_psd(const MatrixXd& A) {
  LogDet out;
  const double trace = A.trace();
  if (!(trace > 0.0) || !std::isfinite(trace)) return out;
  Eigen::LDLT<MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success) return out;
  const VectorXd d = ldlt.vectorD();
  const double threshold = kPivotRelTol * trace;
  double sum = 0.0;
  for (Index i = 0; i < d.size(); ++i) {
    if (!(d[i] >= threshold)) return out;
    sum += std::log(d[i]);
  }
  out.value = sum;
  out.singular = false;
  return out;
}

/// Monte-Carlo Bayesian D-optimality score of a design: the importance-
/// weighted average of log |I(beta_u; X)| over the prior pool. A singular
/// information matrix at any sample with positive weight sends the whole
/// score to -inf (zero-weight samples are skipped; they carry no mass).
inline double bayes_d_criterion(const PriorSamplePool& pool, const MatrixXd& X) {
  pool.validate();
  if (X.rows() == 0) throw std::invalid_argument("bayes_d_criterion: empty design");
  double acc = 0.0;
  for (Index u = 0; u < pool.M(); ++u) {
    const double r = pool.weights[u];
    if (r == 0.0) continue;
    const LogDet ld = logdet_psd(fisher_information(pool.beta_at(u), X));
    if (ld.singular) return negative_infinity<double>();
    acc += r * ld.value;
  }
  return acc;
}

/// Evaluates the Bayesian D score of (base design + one candidate row) for
/// many candidates against one prior pool. Per-sample base matrices are
/// formed once; a candidate is then a rank-one update. Samples whose base
/// matrix is safely positive definite use the matrix-determinant lemma via a
/// cached inverse, the rest recompute the pivoted factorization directly.
class BayesDEvaluator {
 public:
  BayesDEvaluator(const PriorSamplePool& pool, const MatrixXd& base_rows)
      : pool_(pool) {
    pool_.validate();
    const Index M = pool_.M();
    const Index q = pool_.p() + 1;
    base_.resize(static_cast<std::size_t>(M));
    inv_.resize(static_cast<std::size_t>(M));
    base_logdet_.assign(static_cast<std::size_t>(M), 0.0);
    fast_.assign(static_cast<std::size_t>(M), false);
    for (Index u = 0; u < M; ++u) {
      const std::size_t s = static_cast<std::size_t>(u);
      base_[s] = base_rows.rows() > 0
                     ? fisher_information(pool_.beta_at(u), base_rows)
                     : MatrixXd::Zero(q, q);
      if (pool_.weights[u] == 0.0) continue;
      const double trace = base_[s].trace();
      if (!(trace > 0.0)) continue;
      Eigen::LDLT<MatrixXd> f(base_[s]);
      if (f.info() != Eigen::Success) continue;
      const VectorXd d = f.vectorD();
      // Wider margin than the singularity rule so the update formula is
      // only used well inside the positive-definite region.
      if ((d.array() >= 100.0 * kPivotRelTol * trace).all()) {
        base_logdet_[s] = d.array().log().sum();
        inv_[s] = f.solve(MatrixXd::Identity(q, q));
        fast_[s] = true;
      }
    }
  }

  /// Score of base + x. Returns -inf if any positive-weight sample stays
  /// singular after the update.
  double evaluate(const Eigen::Ref<const VectorXd>& x) const {
    const Index M = pool_.M();
    const Index p = pool_.p();
    VectorXd xt(p + 1);
    xt[0] = 1.0;
    xt.tail(p) = x;
    VectorXd tmp(p + 1);
    MatrixXd work;
    double acc = 0.0;
    for (Index u = 0; u < M; ++u) {
      const double r = pool_.weights[u];
      if (r == 0.0) continue;
      const std::size_t s = static_cast<std::size_t>(u);
      const double t = pool_.betas(u, 0) + pool_.betas.row(u).tail(p).dot(x);
      const double w = logistic_weight(t);
      if (fast_[s]) {
        tmp.noalias() = inv_[s] * xt;
        acc += r * (base_logdet_[s] + std::log1p(w * xt.dot(tmp)));
      } else {
        work = base_[s];
        work.noalias() += w * xt * xt.transpose();
        const LogDet ld = logdet_psd(work);
        if (ld.singular) return negative_infinity<double>();
        acc += r * ld.value;
      }
    }
    return acc;
  }

 private:
  PriorSamplePool pool_;
  std::vector<MatrixXd> base_;
  std::vector<MatrixXd> inv_;
  std::vector<double> base_logdet_;
  std::vector<bool> fast_;
};

}  // namespace bayal

#endif  // BAYAL_CRITERIA_HPP_
