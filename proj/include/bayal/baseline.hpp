#ifndef BAYAL_BASELINE_HPP_
#define BAYAL_BASELINE_HPP_

#include <algorithm>
#include <optional>
#include <vector>

#include "bayal/design.hpp"

namespace bayal {

enum class AdslEstimator { kMleWithMapFallback, kMap };

/// Settings of the ADSL comparator: distance-to-boundary screening with a
/// fixed candidate count and local D-optimal selection. ADSL couples the
/// uncertainty level and the cutting point into one number; the harness sets
/// omega == gamma accordingly.
struct AdslConfig {
  Index k0{20};
  AdslEstimator estimator{AdslEstimator::kMleWithMapFallback};
  double omega{0.5};
  double gamma{0.5};

  void validate() const {
    if (k0 < 1) throw std::invalid_argument("AdslConfig: k0 must be >= 1");
    if (!(omega > 0.0 && omega < 1.0 && gamma > 0.0 && gamma < 1.0)) {
      throw std::invalid_argument("AdslConfig: omega and gamma must lie in (0,1)");
    }
  }
};

/// The k0 unlabeled points closest (perpendicular distance) to the estimated
/// boundary at the given level, ties broken by pool index.
inline std::vector<Index> adsl_candidates(const BetaVector& beta, const Pool& pool,
                                          double level, Index k0) {
  const std::vector<Index> unlabeled = pool.unlabeled_indices();
  if (unlabeled.empty()) throw std::runtime_error("adsl_candidates: empty unlabeled pool");
  std::vector<std::pair<double, Index>> ranked;
  ranked.reserve(unlabeled.size());
  for (Index i : unlabeled) {
    ranked.emplace_back(boundary_distance<double>(beta, level, VectorXd(pool.row(i))), i);
  }
  std::sort(ranked.begin(), ranked.end());
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k0), ranked.size());
  std::vector<Index> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = ranked[i].second;
  return out;
}

/// Local D-optimal pick: the candidate maximizing det I(beta; labeled + x).
/// Candidates must arrive distance-sorted; keeping the first maximum breaks
/// ties by distance then index, and when every determinant is zero the
/// closest candidate wins.
inline Index adsl_select(const BetaVector& beta, const Pool& pool,
                         const std::vector<Index>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("adsl_select: empty candidate set");
  const MatrixXd labeled = pool.labeled_features();
  const MatrixXd base = labeled.rows() > 0
                            ? fisher_information(beta, labeled)
                            : MatrixXd::Zero(pool.p() + 1, pool.p() + 1);
  Index best = candidates.front();
  double best_logdet = negative_infinity<double>();
  bool first = true;
  for (Index c : candidates) {
    MatrixXd info = base;
    add_fisher_row<double>(beta, pool.row(c), info);
    const double ld = logdet_psd(info).value;
    if (first || ld > best_logdet) {
      best = c;
      best_logdet = ld;
      first = false;
    }
  }
  return best;
}

/// ADSL learning loop: same skeleton as run_active_learning with the
/// candidate and selection rules replaced and the estimator taken from the
/// config (logistic MLE falling back to the posterior mode when separated or
/// not converged).
inline RunResult run_adsl(Pool pool, const PriorSpec& prior, const AdslConfig& config,
                          int budget, int n0, const EngineConfig& engine, Seed seed) {
  config.validate();
  prior.validate();
  if (n0 < 0 || budget < 0 ||
      static_cast<Index>(n0) + static_cast<Index>(budget) > pool.N()) {
    throw std::invalid_argument("run_adsl: n0 + budget exceeds pool size");
  }

  RunResult out;
  if (n0 > 0) {
    Rng warm(derive_seed(seed, Stream::kWarmStart));
    out.initial_idx = warm.sample_without_replacement(pool.N(), n0);
    pool.set_initial(out.initial_idx);
  }

  const PriorSamplePool prior_pool =
      sample_prior(prior, engine.M_prior, derive_seed(seed, Stream::kPrior));

  BetaVector beta_hat;
  std::optional<ThetaParams> theta_hat;
  bool fit_failed = false;
  auto refit = [&](int stage) {
    if (pool.labeled_idx().empty()) {
      theta_hat = prior_median(prior_pool);
      beta_hat = theta_to_beta(*theta_hat);
      fit_failed = false;
      return;
    }
    const LabeledSet data = pool.labeled_set();
    MapSettings ms = engine.map;
    ms.seed = derive_seed(derive_seed(seed, Stream::kMap), static_cast<Seed>(stage));
    if (config.estimator == AdslEstimator::kMleWithMapFallback) {
      std::optional<BetaVector> init;
      if (beta_hat.coefficients.size() == pool.p()) init = beta_hat;
      const MleResult mle = mle_estimate(data, init, ms.optim);
      if (mle.converged()) {
        beta_hat = mle.beta;
        theta_hat.reset();
        fit_failed = false;
        return;
      }
    }
    const MapResult fit = map_estimate(data, prior, theta_hat, ms);
    BetaVector beta;
    if (detail::finite_constrained_fit(fit.theta, beta)) {
      theta_hat = fit.theta;
      beta_hat = std::move(beta);
      fit_failed = !fit.converged;
    } else if (!theta_hat.has_value() && beta_hat.coefficients.size() != pool.p()) {
      theta_hat = prior_median(prior_pool);
      beta_hat = theta_to_beta(*theta_hat);
      fit_failed = true;
    } else {
      fit_failed = true;  // keep the previous finite estimate
    }
  };

  refit(0);
  out.initial_beta = beta_hat;
  out.initial_theta = theta_hat;

  for (int stage = 1; stage <= budget; ++stage) {
    const std::vector<Index> unlabeled = pool.unlabeled_indices();
    if (unlabeled.empty()) break;
    const VectorXd probs = detail::unlabeled_probs(beta_hat, pool, unlabeled);
    const bool unstable =
        fit_failed || (theta_hat.has_value() &&
                       theta_hat->sigma < engine.unstable_sigma_frac * prior.sigma0);
    if (!unstable && detail::all_saturated(probs, engine.stop_tol)) {
      out.stopped_early = true;
      break;
    }

    StageRecord rec;
    rec.stage = stage;
    std::vector<Index> candidates;
    bool degenerate_boundary = !(beta_hat.coefficients.norm() > 0.0);
    if (!degenerate_boundary) {
      candidates = adsl_candidates(beta_hat, pool, config.omega, config.k0);
      rec.k_n = static_cast<Index>(candidates.size());
      rec.chosen_idx = adsl_select(beta_hat, pool, candidates);
      MatrixXd with = pool.labeled_features();
      // fallback_used marks stages where no candidate design had positive
      // determinant, i.e. the minimum-distance rule decided.
      MatrixXd design(with.rows() + 1, pool.p());
      design.topRows(with.rows()) = with;
      design.row(with.rows()) = pool.row(rec.chosen_idx);
      rec.fallback_used = logdet_psd(fisher_information(beta_hat, design)).singular;
    } else {
      // MLE collapsed onto a flat direction; take any unlabeled point.
      rec.k_n = 1;
      rec.chosen_idx = unlabeled.front();
      rec.fallback_used = true;
    }

    pool.query(rec.chosen_idx);
    refit(stage);
    rec.beta = beta_hat;
    rec.theta = theta_hat;
    rec.map_failed = fit_failed;
    out.records.push_back(std::move(rec));
  }

  out.final_pool = std::move(pool);
  return out;
}

}  // namespace bayal

#endif  // BAYAL_BASELINE_HPP_
