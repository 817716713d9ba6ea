#ifndef BAYAL_DESIGN_HPP_
#define BAYAL_DESIGN_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bayal/criteria.hpp"
#include "bayal/estimators.hpp"
#include "bayal/model.hpp"
#include "bayal/pool.hpp"
#include "bayal/posterior.hpp"
#include "bayal/prior.hpp"
#include "bayal/rng.hpp"

namespace bayal {

struct EngineConfig {
  Index M_prior{1000};
  Index k_cap{0};                 // 0 = default 4*(p+1)
  double d_efficiency_threshold{0.8};
  double fallback_tol{1e-3};      // probabilities this close to 0/1 trip the
                                  // distance-based fallback
  double stop_tol{1e-9};          // probabilities this close to 0/1 stop the run
  double unstable_sigma_frac{1e-3};  // sigma-hat below this fraction of the
                                     // prior scale marks the fit unstable
  MapSettings map{};
};

inline Index default_k_cap(Index p) { return 4 * (p + 1); }

/// One selection step of a run. `estimate` is the fit after the chosen point
/// was labeled, i.e. the classifier available once n0 + stage points are in.
struct StageRecord {
  int stage{};
  Index chosen_idx{-1};
  BetaVector beta;                       // estimate in regression coordinates
  std::optional<ThetaParams> theta;      // present when the fit was a posterior mode
  std::optional<double> criterion_value; // winning Bayesian D score; empty on fallback
  bool fallback_used{false};
  Index k_n{1};
  bool map_failed{false};
};

struct RunResult {
  BetaVector initial_beta;
  std::optional<ThetaParams> initial_theta;
  std::vector<StageRecord> records;
  std::vector<Index> initial_idx;
  bool stopped_early{false};
  Pool final_pool;
};

/// |F(x) - omega| for every unlabeled point, aligned with `unlabeled`.
inline VectorXd uncertainty_scores(const BetaVector& beta, const Pool& pool,
                                   double omega, const std::vector<Index>& unlabeled) {
  if (unlabeled.empty()) {
    throw std::runtime_error("uncertainty_scores: no unlabeled points");
  }
  VectorXd scores(static_cast<Index>(unlabeled.size()));
  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    const VectorXd x = pool.row(unlabeled[i]);
    scores[static_cast<Index>(i)] = std::abs(predict_prob(beta, x) - omega);
  }
  return scores;
}

inline VectorXd uncertainty_scores(const BetaVector& beta, const Pool& pool, double omega) {
  return uncertainty_scores(beta, pool, omega, pool.unlabeled_indices());
}

/// Unlabeled indices sorted ascending by uncertainty score (ties by index),
/// truncated to a stage-dependent size k_n: the smallest k in [p+1, k_cap]
/// whose top-k design reaches relative D-efficiency
///   (det I(beta; top-k) / det I(beta; top-k_cap))^(1/(p+1)) >= threshold,
/// falling through to k_cap when nothing reaches it.
inline std::vector<Index> candidate_set(const BetaVector& beta, const Pool& pool,
                                        double omega, Index k_cap,
                                        double efficiency_threshold = 0.8) {
  if (k_cap < 1) throw std::invalid_argument("candidate_set: k_cap must be >= 1");
  const std::vector<Index> unlabeled = pool.unlabeled_indices();
  if (unlabeled.empty()) throw std::runtime_error("candidate_set: empty unlabeled pool");

  const VectorXd scores = uncertainty_scores(beta, pool, omega, unlabeled);
  std::vector<std::size_t> order(unlabeled.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = scores[static_cast<Index>(a)];
    const double sb = scores[static_cast<Index>(b)];
    if (sa != sb) return sa < sb;
    return unlabeled[a] < unlabeled[b];
  });
  std::vector<Index> ranked(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) ranked[i] = unlabeled[order[i]];

  const Index p = pool.p();
  const Index n_unl = static_cast<Index>(ranked.size());
  if (n_unl <= p + 1) return ranked;  // cannot shrink below the rank requirement

  const Index cap = std::min<Index>(k_cap, n_unl);
  std::vector<double> logdets;  // logdet of top-k design for k = 1..cap
  logdets.reserve(static_cast<std::size_t>(cap));
  {
    MatrixXd info = MatrixXd::Zero(p + 1, p + 1);
    for (Index k = 0; k < cap; ++k) {
      add_fisher_row<double>(beta, pool.row(ranked[static_cast<std::size_t>(k)]), info);
      logdets.push_back(logdet_psd(info).value);
    }
  }
  const double ld_cap = logdets.back();
  Index k_n = cap;
  if (std::isfinite(ld_cap)) {
    for (Index k = p + 1; k <= cap; ++k) {
      const double ld_k = logdets[static_cast<std::size_t>(k - 1)];
      if (!std::isfinite(ld_k)) continue;
      const double efficiency = std::exp((ld_k - ld_cap) / static_cast<double>(p + 1));
      if (efficiency >= efficiency_threshold) {
        k_n = k;
        break;
      }
    }
  }
  ranked.resize(static_cast<std::size_t>(std::min(k_n, n_unl)));
  return ranked;
}

struct SelectResult {
  Index idx{-1};
  double criterion{negative_infinity<double>()};
  bool augmented{false};
};

/// Picks the candidate maximizing the Bayesian D score of the labeled design
/// plus that candidate. While the information matrix at the current estimate
/// is singular, the score is computed over labeled + all candidates + the
/// candidate instead. Candidates must arrive sorted by uncertainty rank, so
/// keeping the first maximum implements the (score, uncertainty, index)
/// tie-break; when every candidate scores -inf the ranking therefore falls
/// back to plain uncertainty ordering.
inline SelectResult select_next(const BetaVector& beta_hat, const Pool& pool,
                                const std::vector<Index>& candidates,
                                const PriorSamplePool& samples) {
  if (candidates.empty()) throw std::invalid_argument("select_next: empty candidate set");

  const MatrixXd labeled = pool.labeled_features();
  SelectResult res;
  res.augmented = logdet_psd(fisher_information(beta_hat, labeled)).singular;

  MatrixXd base;
  if (!res.augmented) {
    base = labeled;
  } else {
    base.resize(labeled.rows() + static_cast<Index>(candidates.size()), pool.p());
    base.topRows(labeled.rows()) = labeled;
    base.bottomRows(static_cast<Index>(candidates.size())) = pool.rows(candidates);
  }

  const BayesDEvaluator evaluator(samples, base);
  bool first = true;
  for (Index c : candidates) {
    const double value = evaluator.evaluate(pool.row(c));
    if (first || value > res.criterion) {
      res.idx = c;
      res.criterion = value;
      first = false;
    }
  }
  return res;
}

namespace detail {

inline VectorXd unlabeled_probs(const BetaVector& beta, const Pool& pool,
                                const std::vector<Index>& unlabeled) {
  VectorXd probs(static_cast<Index>(unlabeled.size()));
  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    probs[static_cast<Index>(i)] = predict_prob(beta, VectorXd(pool.row(unlabeled[i])));
  }
  return probs;
}

inline bool all_saturated(const VectorXd& probs, double tol) {
  for (Index i = 0; i < probs.size(); ++i) {
    if (probs[i] > tol && probs[i] < 1.0 - tol) return false;
  }
  return true;
}

inline Index min_distance_index(const BetaVector& beta, const Pool& pool, double level,
                                const std::vector<Index>& unlabeled) {
  Index best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Index i : unlabeled) {
    const double d = boundary_distance<double>(beta, level, VectorXd(pool.row(i)));
    if (d <= best_dist && best < 0) {  // accept the first finite (or inf) value
      best_dist = d;
      best = i;
    } else if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  if (best < 0) {
    throw std::runtime_error("fallback selection degenerate: no comparable distances");
  }
  return best;
}

/// Fit adoption guard: a runaway scale can push beta past the floating-point
/// range; such fits are rejected and the caller keeps its previous estimate.
inline bool finite_constrained_fit(const ThetaParams& theta, BetaVector& beta_out) {
  if (!theta.is_valid()) return false;
  BetaVector beta;
  beta.intercept = -theta.mu / theta.sigma;
  beta.coefficients = theta.weights / theta.sigma;
  if (!std::isfinite(beta.intercept) || !beta.coefficients.allFinite()) return false;
  beta_out = std::move(beta);
  return true;
}

}  // namespace detail

/// Full uncertainty-screened Bayesian D-optimal learning loop. Per stage:
/// fit (posterior mode; prior median while nothing is labeled), stop if all
/// remaining probabilities are saturated, fall back to distance-based
/// selection while the fit is unstable, otherwise screen by uncertainty,
/// reweight the prior pool, and pick the Bayesian D maximizer. Deterministic
/// for a fixed seed.
inline RunResult run_active_learning(Pool pool, const PriorSpec& prior,
                                     const ClassifierRule& rule, int budget, int n0,
                                     const EngineConfig& config, Seed seed) {
  rule.validate();
  prior.validate();
  if (n0 < 0 || budget < 0 ||
      static_cast<Index>(n0) + static_cast<Index>(budget) > pool.N()) {
    throw std::invalid_argument("run_active_learning: n0 + budget exceeds pool size");
  }

  RunResult out;
  const Index k_cap = config.k_cap > 0 ? config.k_cap : default_k_cap(pool.p());

  if (n0 > 0) {
    Rng warm(derive_seed(seed, Stream::kWarmStart));
    out.initial_idx = warm.sample_without_replacement(pool.N(), n0);
    pool.set_initial(out.initial_idx);
  }

  const PriorSamplePool prior_pool =
      sample_prior(prior, config.M_prior, derive_seed(seed, Stream::kPrior));

  // Fit on whatever is labeled; prior median when nothing is.
  bool map_failed = false;
  BetaVector beta_hat;
  std::optional<ThetaParams> theta_hat;
  auto refit = [&](int stage) {
    if (pool.labeled_idx().empty()) {
      theta_hat = prior_median(prior_pool);
      beta_hat = theta_to_beta(*theta_hat);
      map_failed = false;
      return;
    }
    MapSettings ms = config.map;
    ms.seed = derive_seed(derive_seed(seed, Stream::kMap), static_cast<Seed>(stage));
    const MapResult fit = map_estimate(pool.labeled_set(), prior, theta_hat, ms);
    BetaVector beta;
    if (detail::finite_constrained_fit(fit.theta, beta)) {
      theta_hat = fit.theta;
      beta_hat = std::move(beta);
      map_failed = !fit.converged;
    } else if (!theta_hat.has_value()) {
      theta_hat = prior_median(prior_pool);
      beta_hat = theta_to_beta(*theta_hat);
      map_failed = true;
    } else {
      map_failed = true;  // keep the previous finite estimate
    }
  };

  refit(0);
  out.initial_beta = beta_hat;
  out.initial_theta = theta_hat;

  for (int stage = 1; stage <= budget; ++stage) {
    const std::vector<Index> unlabeled = pool.unlabeled_indices();
    if (unlabeled.empty()) break;
    const VectorXd probs = detail::unlabeled_probs(beta_hat, pool, unlabeled);

    // A collapsed scale means the fit is a hard separator of a still-separable
    // labeled set, not a confident classifier; saturation under such a fit is
    // handled by the distance fallback rather than by stopping.
    const bool unstable =
        map_failed || (theta_hat.has_value() &&
                       theta_hat->sigma < config.unstable_sigma_frac * prior.sigma0);
    if (!unstable && detail::all_saturated(probs, config.stop_tol)) {
      out.stopped_early = true;
      break;
    }

    StageRecord rec;
    rec.stage = stage;
    const bool uninformative = detail::all_saturated(probs, config.fallback_tol);
    if (unstable || uninformative) {
      rec.fallback_used = true;
      rec.k_n = 1;
      rec.chosen_idx = detail::min_distance_index(beta_hat, pool, rule.omega, unlabeled);
    } else {
      const PriorSamplePool reweighted = importance_weights(prior_pool, pool.labeled_set());
      const std::vector<Index> candidates =
          candidate_set(beta_hat, pool, rule.omega, k_cap, config.d_efficiency_threshold);
      const SelectResult sel = select_next(beta_hat, pool, candidates, reweighted);
      rec.chosen_idx = sel.idx;
      rec.criterion_value = sel.criterion;
      rec.k_n = static_cast<Index>(candidates.size());
    }

    pool.query(rec.chosen_idx);
    refit(stage);
    rec.beta = beta_hat;
    rec.theta = theta_hat;
    rec.map_failed = map_failed;
    out.records.push_back(std::move(rec));
  }

  out.final_pool = std::move(pool);
  return out;
}

}  // namespace bayal

#endif  // BAYAL_DESIGN_HPP_
