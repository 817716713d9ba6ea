#ifndef BAYAL_MATH_HPP_
#define BAYAL_MATH_HPP_

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bayal/types.hpp"

namespace bayal {

/// Standard logistic function 1/(1+e^-t), evaluated without overflow.
template <typename T>
T logistic(T t) {
  if (t >= T(0)) {
    return T(1) / (T(1) + std::exp(-t));
  }
  const T e = std::exp(t);
  return e / (T(1) + e);
}

/// Inverse of `logistic`. Requires p in (0,1).
template <typename T>
T logit(T p) {
  if (!(p > T(0) && p < T(1))) {
    throw std::domain_error("logit: argument must lie strictly in (0,1)");
  }
  return std::log(p) - std::log1p(-p);
}

/// log(1 + e^t) with the usual large/small-argument branches.
template <typename T>
T log1pexp(T t) {
  if (t <= T(-37)) return std::exp(t);
  if (t <= T(18)) return std::log1p(std::exp(t));
  if (t <= T(33.3)) return t + std::exp(-t);
  return t;
}

/// Bernoulli log-likelihood term for linear predictor t and label y.
/// Written as -log1pexp(-t) / -log1pexp(t) so that t = +-inf yields the
/// correct limit instead of inf - inf.
template <typename T>
T bernoulli_logpmf(T t, int y) {
  return y != 0 ? -log1pexp(-t) : -log1pexp(t);
}

/// F(1-F) at linear predictor t; the logistic variance weight.
template <typename T>
T logistic_weight(T t) {
  const T e = std::exp(-std::abs(t));
  const T d = T(1) + e;
  return e / (d * d);
}

/// Softmax of v, computed with a max shift.
template <typename T>
VectorX<T> softmax(const VectorX<T>& v) {
  const T m = v.maxCoeff();
  VectorX<T> w = (v.array() - m).exp();
  w /= w.sum();
  return w;
}

/// Centered log-ratio coordinates of a point on the open simplex.
/// Inverse of `softmax` up to the additive gauge, which centering fixes.
template <typename T>
VectorX<T> clr(const VectorX<T>& w) {
  VectorX<T> v = w.array().log();
  v.array() -= v.mean();
  return v;
}

template <typename T>
constexpr T negative_infinity() {
  return -std::numeric_limits<T>::infinity();
}

}  // namespace bayal

#endif  // BAYAL_MATH_HPP_
