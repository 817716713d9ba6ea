#ifndef BAYAL_MODEL_HPP_
#define BAYAL_MODEL_HPP_

#include <cmath>
#include <stdexcept>

#include "bayal/math.hpp"
#include "bayal/types.hpp"

namespace bayal {

inline constexpr double kWeightSumTol = 1e-10;

/// Location/scale/convex-weight parameterization of the constrained
/// logistic model: P(Y=1|x) = logistic((w.x - mu)/sigma).
template <typename T>
struct ThetaParamsT {
  T mu{};
  T sigma{1};
  VectorX<T> weights;

  Index p() const { return weights.size(); }

  bool is_valid() const {
    if (!(sigma > T(0)) || weights.size() == 0) return false;
    for (Index j = 0; j < weights.size(); ++j) {
      if (!(weights[j] > T(0) && weights[j] < T(1))) return false;
    }
    return std::abs(double(weights.sum() - T(1))) <= kWeightSumTol;
  }

  void validate() const {
    if (!is_valid()) {
      throw std::invalid_argument(
          "ThetaParams: requires sigma > 0, weights strictly in (0,1) summing to 1");
    }
  }
};

/// Conventional logistic-regression coordinates: intercept plus slope per
/// feature. When obtained from a valid ThetaParams all slopes are positive
/// and sum to 1/sigma.
template <typename T>
struct BetaVectorT {
  T intercept{};
  VectorX<T> coefficients;

  Index p() const { return coefficients.size(); }

  /// Augmented coordinates (intercept first).
  VectorX<T> augmented() const {
    VectorX<T> b(coefficients.size() + 1);
    b[0] = intercept;
    b.tail(coefficients.size()) = coefficients;
    return b;
  }

  static BetaVectorT from_augmented(const VectorX<T>& b) {
    BetaVectorT out;
    out.intercept = b[0];
    out.coefficients = b.tail(b.size() - 1);
    return out;
  }
};

/// Query/decision thresholds: omega centers the uncertainty measure used to
/// pick the next query; gamma is the cutting point of the class decision.
/// They are deliberately independent.
struct ClassifierRule {
  double omega{0.5};
  double gamma{0.5};

  void validate() const {
    if (!(omega > 0.0 && omega < 1.0 && gamma > 0.0 && gamma < 1.0)) {
      throw std::invalid_argument("ClassifierRule: omega and gamma must lie in (0,1)");
    }
  }
};

using ThetaParams = ThetaParamsT<double>;
using BetaVector = BetaVectorT<double>;

template <typename T, typename Derived>
T linear_predictor(const BetaVectorT<T>& beta, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != beta.coefficients.size()) {
    throw std::invalid_argument("linear_predictor: feature dimension mismatch");
  }
  return beta.intercept + beta.coefficients.dot(x);
}

template <typename T, typename Derived>
T predict_prob(const ThetaParamsT<T>& theta, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != theta.weights.size()) {
    throw std::invalid_argument("predict_prob: feature dimension mismatch");
  }
  return logistic((theta.weights.dot(x) - theta.mu) / theta.sigma);
}

template <typename T, typename Derived>
T predict_prob(const BetaVectorT<T>& beta, const Eigen::MatrixBase<Derived>& x) {
  return logistic(linear_predictor(beta, x));
}

template <typename T>
BetaVectorT<T> theta_to_beta(const ThetaParamsT<T>& theta) {
  theta.validate();
  BetaVectorT<T> beta;
  beta.intercept = -theta.mu / theta.sigma;
  beta.coefficients = theta.weights / theta.sigma;
  return beta;
}

template <typename T>
ThetaParamsT<T> beta_to_theta(const BetaVectorT<T>& beta) {
  if (beta.coefficients.size() == 0 || (beta.coefficients.array() <= T(0)).any()) {
    throw std::domain_error("beta_to_theta: not representable in constrained form");
  }
  const T s = beta.coefficients.sum();
  ThetaParamsT<T> theta;
  theta.sigma = T(1) / s;
  theta.weights = beta.coefficients * theta.sigma;
  theta.mu = -beta.intercept * theta.sigma;
  return theta;
}

/// Fisher information X~' W X~ of the logistic model over the given design
/// rows (features only; the leading 1 is added internally). n = 0 yields the
/// zero matrix.
template <typename T>
MatrixX<T> fisher_information(const BetaVectorT<T>& beta, const MatrixX<T>& X) {
  const Index p = beta.coefficients.size();
  if (X.rows() > 0 && X.cols() != p) {
    throw std::invalid_argument("fisher_information: design dimension mismatch");
  }
  MatrixX<T> info = MatrixX<T>::Zero(p + 1, p + 1);
  VectorX<T> xt(p + 1);
  for (Index i = 0; i < X.rows(); ++i) {
    const T t = beta.intercept + beta.coefficients.dot(X.row(i));
    const T w = logistic_weight(t);
    xt[0] = T(1);
    xt.tail(p) = X.row(i);
    info.noalias() += w * xt * xt.transpose();
  }
  return info;
}

/// Rank-one Fisher information term of a single design row.
template <typename T, typename Derived>
void add_fisher_row(const BetaVectorT<T>& beta, const Eigen::MatrixBase<Derived>& x,
                    MatrixX<T>& info) {
  const Index p = beta.coefficients.size();
  const T t = linear_predictor(beta, x);
  const T w = logistic_weight(t);
  VectorX<T> xt(p + 1);
  xt[0] = T(1);
  xt.tail(p) = x;
  info.noalias() += w * xt * xt.transpose();
}

inline int classify(double prob, const ClassifierRule& rule) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw std::invalid_argument("classify: probability outside [0,1]");
  }
  return prob > rule.gamma ? 1 : 0;
}

/// Perpendicular distance from x to the probability level set of the fitted
/// model, i.e. to the hyperplane x~'beta = logit(level).
template <typename T, typename Derived>
T boundary_distance(const BetaVectorT<T>& beta, T level,
                    const Eigen::MatrixBase<Derived>& x) {
  const T norm = beta.coefficients.norm();
  if (!(norm > T(0))) {
    throw std::domain_error("boundary_distance: degenerate boundary");
  }
  return std::abs(linear_predictor<T>(beta, x) - logit(level)) / norm;
}

}  // namespace bayal

#endif  // BAYAL_MODEL_HPP_
