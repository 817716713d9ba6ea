#ifndef BAYAL_POSTERIOR_HPP_
#define BAYAL_POSTERIOR_HPP_

#include <cmath>

#include "bayal/math.hpp"
#include "bayal/model.hpp"
#include "bayal/pool.hpp"
#include "bayal/prior.hpp"
#include "bayal/types.hpp"

namespace bayal {

/// Log posterior density of theta given the labeled rows (likelihood plus
/// log prior, fully normalized in theta). Out-of-support theta maps to -inf.
inline double log_posterior(const ThetaParams& theta, const LabeledSet& data,
                            const PriorSpec& prior) {
  data.validate();
  const double lp = log_prior(theta, prior);
  if (!std::isfinite(lp)) return negative_infinity<double>();
  double ll = 0.0;
  for (Index i = 0; i < data.n(); ++i) {
    const double t = (theta.weights.dot(data.X.row(i)) - theta.mu) / theta.sigma;
    ll += bernoulli_logpmf(t, data.y[i]);
  }
  return ll + lp;
}

/// Unconstrained coordinates for posterior maximization:
///   u = (mu, log sigma, v_1..v_p) with w = softmax(v).
/// The softmax block is gauge-invariant; packing uses centered log-ratios.
inline VectorXd pack_theta(const ThetaParams& theta) {
  theta.validate();
  VectorXd u(theta.p() + 2);
  u[0] = theta.mu;
  u[1] = std::log(theta.sigma);
  u.tail(theta.p()) = clr<double>(theta.weights);
  return u;
}

inline ThetaParams unpack_theta(const VectorXd& u) {
  ThetaParams theta;
  theta.mu = u[0];
  theta.sigma = std::exp(u[1]);
  theta.weights = softmax<double>(VectorXd(u.tail(u.size() - 2)));
  return theta;
}

/// Log posterior and its gradient in the unconstrained coordinates.
/// Maximizing this is equivalent to maximizing log_posterior over theta.
class MapObjective {
 public:
  MapObjective(const LabeledSet& data, const PriorSpec& prior)
      : data_(data), prior_(prior) {
    data_.validate();
    prior_.validate();
  }

  Index dim() const { return prior_.p() + 2; }

  double value(const VectorXd& u) const {
    return log_posterior(unpack_theta(u), data_, prior_);
  }

  double value_and_grad(const VectorXd& u, VectorXd& grad) const {
    const Index p = prior_.p();
    const double mu = u[0];
    const double sigma = std::exp(u[1]);
    const VectorXd w = softmax<double>(VectorXd(u.tail(p)));
    grad.setZero(dim());
    if (!std::isfinite(sigma) || !(sigma > 0.0)) return negative_infinity<double>();

    double value = 0.0;
    double sum_resid = 0.0;       // sum of (y - F)
    double sum_resid_t = 0.0;     // sum of (y - F) t
    VectorXd grad_w = VectorXd::Zero(p);
    for (Index i = 0; i < data_.n(); ++i) {
      const double t = (w.dot(data_.X.row(i)) - mu) / sigma;
      value += bernoulli_logpmf(t, data_.y[i]);
      const double resid = static_cast<double>(data_.y[i]) - logistic(t);
      sum_resid += resid;
      sum_resid_t += resid * t;
      grad_w += (resid / sigma) * data_.X.row(i).transpose();
    }

    value += log_normal_pdf(mu, prior_.mu0, prior_.sigma_mu2);
    value += log_exponential_pdf(sigma, prior_.sigma0);
    value += log_dirichlet_pdf(w, prior_.alpha);

    grad[0] = -sum_resid / sigma - (mu - prior_.mu0) / prior_.sigma_mu2;
    grad[1] = -sum_resid_t - sigma / prior_.sigma0;
    grad_w += ((prior_.alpha.array() - 1.0) / w.array()).matrix();
    // Chain rule through softmax: J = diag(w) - w w'.
    grad.tail(p) = w.array() * (grad_w.array() - w.dot(grad_w));
    return value;
  }

  const LabeledSet& data() const { return data_; }
  const PriorSpec& prior() const { return prior_; }

 private:
  LabeledSet data_;
  PriorSpec prior_;
};

/// Unconstrained logistic log likelihood and gradient in beta coordinates,
/// for maximum-likelihood fitting.
class LoglikObjective {
 public:
  explicit LoglikObjective(const LabeledSet& data) : data_(data) { data_.validate(); }

  Index dim() const { return data_.p() + 1; }

  double value_and_grad(const VectorXd& b, VectorXd& grad) const {
    grad.setZero(dim());
    double value = 0.0;
    for (Index i = 0; i < data_.n(); ++i) {
      const double t = b[0] + b.tail(data_.p()).dot(data_.X.row(i));
      value += bernoulli_logpmf(t, data_.y[i]);
      const double resid = static_cast<double>(data_.y[i]) - logistic(t);
      grad[0] += resid;
      grad.tail(data_.p()) += resid * data_.X.row(i).transpose();
    }
    return value;
  }

  const LabeledSet& data() const { return data_; }

 private:
  LabeledSet data_;
};

}  // namespace bayal

#endif  // BAYAL_POSTERIOR_HPP_
