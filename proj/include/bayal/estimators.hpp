#ifndef BAYAL_ESTIMATORS_HPP_
#define BAYAL_ESTIMATORS_HPP_

#include <optional>

#include "bayal/optimize.hpp"
#include "bayal/posterior.hpp"
#include "bayal/prior.hpp"
#include "bayal/rng.hpp"

namespace bayal {

struct MapSettings {
  OptimSettings optim{};
  int extra_starts{4};  // prior draws tried in addition to the median point
  Seed seed{0};
};

struct MapResult {
  ThetaParams theta;
  double log_post{};
  double grad_inf_norm{};
  int iterations{};
  bool converged{};
};

namespace detail {

/// Cheap stand-in for the prior median used to start the optimizer:
/// marginal medians for mu and sigma, the normalized concentration vector
/// for the weights.
inline ThetaParams prior_center(const PriorSpec& prior) {
  ThetaParams t;
  t.mu = prior.mu0;
  t.sigma = prior.sigma0 * std::log(2.0);
  t.weights = prior.alpha / prior.alpha.sum();
  return t;
}

}  // namespace detail

/// Posterior mode via multi-start BFGS over the unconstrained coordinates.
/// Starts: the supplied init (if any), the prior center, and a few prior
/// draws; the best final value wins. `converged` is false when the winning
/// start hit the iteration cap, in which case the best iterate is still
/// returned.
inline MapResult map_estimate(const LabeledSet& data, const PriorSpec& prior,
                              const std::optional<ThetaParams>& init = std::nullopt,
                              const MapSettings& settings = {}) {
  MapObjective objective(data, prior);
  auto fn = [&objective](const VectorXd& u, VectorXd& grad) {
    return objective.value_and_grad(u, grad);
  };

  std::vector<VectorXd> starts;
  if (init.has_value()) starts.push_back(pack_theta(*init));
  starts.push_back(pack_theta(detail::prior_center(prior)));
  if (settings.extra_starts > 0) {
    const PriorSamplePool draws =
        sample_prior(prior, settings.extra_starts, derive_seed(settings.seed, Stream::kMap));
    for (Index u = 0; u < draws.M(); ++u) starts.push_back(pack_theta(draws.theta_at(u)));
  }

  bool have_best = false;
  OptimResult best;
  for (const VectorXd& start : starts) {
    OptimResult r = maximize_bfgs(fn, start, settings.optim);
    if (!have_best || r.value > best.value) {
      best = std::move(r);
      have_best = true;
    }
  }

  MapResult res;
  res.theta = unpack_theta(best.x);
  res.log_post = best.value;
  res.grad_inf_norm = best.grad_inf_norm;
  res.iterations = best.iterations;
  res.converged = best.converged;
  return res;
}

enum class MleStatus { kConverged, kSeparated, kNotConverged };

struct MleResult {
  BetaVector beta;
  MleStatus status{MleStatus::kNotConverged};
  double loglik{};
  double grad_inf_norm{};

  bool converged() const { return status == MleStatus::kConverged; }
};

/// Unconstrained logistic MLE by BFGS. Complete separation shows up as the
/// optimizer drifting without meeting the gradient tolerance while every
/// training point sits on the correct side; that case is flagged so callers
/// can fall back to the posterior mode.
inline MleResult mle_estimate(const LabeledSet& data,
                              const std::optional<BetaVector>& init = std::nullopt,
                              const OptimSettings& settings = {}) {
  LoglikObjective objective(data);
  auto fn = [&objective](const VectorXd& b, VectorXd& grad) {
    return objective.value_and_grad(b, grad);
  };
  VectorXd b0 = VectorXd::Zero(objective.dim());
  if (init.has_value()) b0 = init->augmented();

  const OptimResult r = maximize_bfgs(fn, b0, settings);

  MleResult res;
  res.beta = BetaVector::from_augmented(r.x);
  res.loglik = r.value;
  res.grad_inf_norm = r.grad_inf_norm;
  // Strictly positive margins everywhere certify complete separation: scaling
  // beta up would keep increasing the likelihood, so no finite maximizer
  // exists even when the gradient already looks flat.
  bool all_correct_side = data.n() > 0;
  for (Index i = 0; i < data.n(); ++i) {
    const double t = res.beta.intercept + res.beta.coefficients.dot(data.X.row(i));
    if ((data.y[i] == 1 ? t : -t) <= 0.0) {
      all_correct_side = false;
      break;
    }
  }
  if (all_correct_side) {
    res.status = MleStatus::kSeparated;
  } else {
    res.status = r.converged ? MleStatus::kConverged : MleStatus::kNotConverged;
  }
  return res;
}

}  // namespace bayal

#endif  // BAYAL_ESTIMATORS_HPP_
