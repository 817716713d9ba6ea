#ifndef BAYAL_PRIOR_HPP_
#define BAYAL_PRIOR_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bayal/math.hpp"
#include "bayal/model.hpp"
#include "bayal/pool.hpp"
#include "bayal/rng.hpp"
#include "bayal/types.hpp"

namespace bayal {

/// Hyperparameters of the independent priors
///   mu ~ Normal(mu0, sigma_mu2), sigma ~ Exponential(mean sigma0),
///   w  ~ Dirichlet(alpha).
struct PriorSpec {
  double mu0{0.0};
  double sigma_mu2{1.0};
  double sigma0{1.0};
  VectorXd alpha;

  Index p() const { return alpha.size(); }

  void validate() const {
    if (!(sigma_mu2 > 0.0) || !(sigma0 > 0.0) || alpha.size() == 0 ||
        (alpha.array() <= 0.0).any()) {
      throw std::invalid_argument(
          "PriorSpec: sigma_mu2, sigma0 and all alpha entries must be positive");
    }
  }
};

inline double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * M_PI * var) - d * d / (2.0 * var);
}

/// Exponential density parameterized by its mean.
inline double log_exponential_pdf(double x, double mean) {
  if (!(x > 0.0)) return negative_infinity<double>();
  return -std::log(mean) - x / mean;
}

inline double log_dirichlet_pdf(const VectorXd& w, const VectorXd& alpha) {
  if (w.size() != alpha.size()) {
    throw std::invalid_argument("log_dirichlet_pdf: dimension mismatch");
  }
  double v = std::lgamma(alpha.sum());
  for (Index j = 0; j < alpha.size(); ++j) {
    v -= std::lgamma(alpha[j]);
    v += (alpha[j] - 1.0) * std::log(w[j]);
  }
  return v;
}

/// Joint log prior density at theta; -inf signals "out of support".
inline double log_prior(const ThetaParams& theta, const PriorSpec& prior) {
  prior.validate();
  if (theta.weights.size() != prior.alpha.size() || !theta.is_valid()) {
    return negative_infinity<double>();
  }
  return log_normal_pdf(theta.mu, prior.mu0, prior.sigma_mu2) +
         log_exponential_pdf(theta.sigma, prior.sigma0) +
         log_dirichlet_pdf(theta.weights, prior.alpha);
}

/// Monte-Carlo representation of the prior: M draws kept in both
/// parameterizations plus importance weights that sum to one. The pool is
/// drawn once per run and reweighted as labels accumulate.
struct PriorSamplePool {
  // thetas: col 0 = mu, col 1 = sigma, cols 2.. = weights.
  MatrixXd thetas;
  // betas: col 0 = intercept, cols 1.. = coefficients.
  MatrixXd betas;
  VectorXd weights;

  Index M() const { return betas.rows(); }
  Index p() const { return betas.cols() - 1; }

  BetaVector beta_at(Index u) const {
    BetaVector b;
    b.intercept = betas(u, 0);
    b.coefficients = betas.row(u).tail(p()).transpose();
    return b;
  }

  ThetaParams theta_at(Index u) const {
    ThetaParams t;
    t.mu = thetas(u, 0);
    t.sigma = thetas(u, 1);
    t.weights = thetas.row(u).tail(p()).transpose();
    return t;
  }

  void validate() const {
    if (M() < 1) throw std::invalid_argument("PriorSamplePool: needs at least one sample");
    if (std::abs(weights.sum() - 1.0) > 1e-10) {
      throw std::invalid_argument("PriorSamplePool: weights must sum to 1");
    }
  }
};

/// Draws M prior samples and maps them into regression coordinates; initial
/// weights are uniform.
inline PriorSamplePool sample_prior(const PriorSpec& prior, Index M, Seed seed) {
  prior.validate();
  if (M < 1) throw std::invalid_argument("sample_prior: M must be >= 1");
  const Index p = prior.p();
  Rng rng(seed);
  PriorSamplePool pool;
  pool.thetas.resize(M, p + 2);
  pool.betas.resize(M, p + 1);
  for (Index u = 0; u < M; ++u) {
    const double mu = rng.normal(prior.mu0, std::sqrt(prior.sigma_mu2));
    const double sigma = rng.exponential(prior.sigma0);
    const VectorXd w = rng.dirichlet(prior.alpha);
    pool.thetas(u, 0) = mu;
    pool.thetas(u, 1) = sigma;
    pool.thetas.row(u).tail(p) = w.transpose();
    pool.betas(u, 0) = -mu / sigma;
    pool.betas.row(u).tail(p) = (w / sigma).transpose();
  }
  pool.weights = VectorXd::Constant(M, 1.0 / static_cast<double>(M));
  return pool;
}

/// Componentwise median of the prior draws, with the weight block renormalized
/// back to the simplex. Used as the stage-zero estimate when nothing is
/// labeled yet.
inline ThetaParams prior_median(const PriorSamplePool& pool) {
  pool.validate();
  const Index M = pool.M();
  const Index p = pool.p();
  auto col_median = [M](VectorXd v) {
    std::vector<double> buf(v.data(), v.data() + M);
    const std::size_t mid = buf.size() / 2;
    std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid), buf.end());
    double hi = buf[mid];
    if (buf.size() % 2 == 0) {
      const double lo = *std::max_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid));
      return 0.5 * (lo + hi);
    }
    return hi;
  };
  ThetaParams t;
  t.mu = col_median(pool.thetas.col(0));
  t.sigma = col_median(pool.thetas.col(1));
  t.weights.resize(p);
  for (Index j = 0; j < p; ++j) t.weights[j] = col_median(pool.thetas.col(2 + j));
  t.weights /= t.weights.sum();
  t.validate();
  return t;
}

/// Bernoulli log likelihood of the labeled rows under beta.
inline double bernoulli_loglik(const BetaVector& beta, const LabeledSet& data) {
  double v = 0.0;
  for (Index i = 0; i < data.n(); ++i) {
    const double t = beta.intercept + beta.coefficients.dot(data.X.row(i));
    v += bernoulli_logpmf(t, data.y[i]);
  }
  return v;
}

/// Reweights the pool by the likelihood of the observed labels, normalized
/// across samples (computed on the log scale with a max shift). Empty data
/// resets to uniform weights.
inline PriorSamplePool importance_weights(const PriorSamplePool& pool, const LabeledSet& data) {
  pool.validate();
  data.validate();
  PriorSamplePool out = pool;
  const Index M = pool.M();
  if (data.n() == 0) {
    out.weights = VectorXd::Constant(M, 1.0 / static_cast<double>(M));
    return out;
  }
  if (data.p() != pool.p()) {
    throw std::invalid_argument("importance_weights: feature dimension mismatch");
  }
  // Linear predictors for all samples at once: (n x (p+1)) * ((p+1) x M).
  MatrixXd Xt(data.n(), pool.p() + 1);
  Xt.col(0).setOnes();
  Xt.rightCols(pool.p()) = data.X;
  const MatrixXd T = Xt * pool.betas.transpose();  // n x M
  VectorXd loglik = VectorXd::Zero(M);
  for (Index i = 0; i < data.n(); ++i) {
    for (Index u = 0; u < M; ++u) {
      loglik[u] += bernoulli_logpmf(T(i, u), data.y[i]);
    }
  }
  const double shift = loglik.maxCoeff();
  if (!std::isfinite(shift)) {
    throw std::runtime_error("importance_weights: all likelihoods degenerate");
  }
  out.weights = (loglik.array() - shift).exp();
  const double s = out.weights.sum();
  if (!(s > 0.0)) {
    throw std::runtime_error("importance_weights: weights underflowed to zero");
  }
  out.weights /= s;
  return out;
}

}  // namespace bayal

#endif  // BAYAL_PRIOR_HPP_
