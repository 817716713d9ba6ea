#ifndef BAYAL_OPTIMIZE_HPP_
#define BAYAL_OPTIMIZE_HPP_

#include <cmath>
#include <functional>

#include "bayal/types.hpp"

namespace bayal {

struct OptimSettings {
  int max_iter{500};
  double grad_tol{1e-6};     // sup-norm of the gradient at convergence
  double min_step{1e-14};    // line search gives up below this
  double armijo_c1{1e-4};
};

struct OptimResult {
  VectorXd x;
  double value{};
  double grad_inf_norm{};
  int iterations{};
  bool converged{};
};

/// BFGS ascent with Armijo backtracking. `fn(x, grad)` returns the objective
/// value and fills its gradient; non-finite values reject the trial step.
/// The inverse-Hessian update is skipped when the curvature condition fails,
/// so the search direction stays an ascent direction.
inline OptimResult maximize_bfgs(
    const std::function<double(const VectorXd&, VectorXd&)>& fn, VectorXd x0,
    const OptimSettings& settings = {}) {
  const Index n = x0.size();
  OptimResult res;
  res.x = std::move(x0);

  VectorXd grad(n);
  double f = fn(res.x, grad);
  MatrixXd H = MatrixXd::Identity(n, n);

  VectorXd x_new(n), grad_new(n), direction(n), s(n), yv(n);
  int iter = 0;
  for (; iter < settings.max_iter; ++iter) {
    res.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
    if (std::isfinite(f) && res.grad_inf_norm <= settings.grad_tol) {
      res.converged = true;
      break;
    }

    direction.noalias() = H * grad;
    double slope = grad.dot(direction);
    if (!(slope > 0.0) || !direction.allFinite()) {
      // Fall back to steepest ascent if H lost positive definiteness.
      direction = grad;
      slope = grad.squaredNorm();
      H.setIdentity();
      if (!(slope > 0.0)) break;
    }

    double step = 1.0;
    double f_new = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    while (step >= settings.min_step) {
      x_new = res.x + step * direction;
      f_new = fn(x_new, grad_new);
      if (std::isfinite(f_new) && f_new >= f + settings.armijo_c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    s = x_new - res.x;
    yv = grad_new - grad;
    const double sy = -s.dot(yv);  // positive when curvature is informative
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      const double rho = 1.0 / sy;
      // H <- (I - rho s y') H (I - rho y s') + rho s s', written for ascent
      // on f (gradient differences enter with opposite sign).
      const VectorXd Hy = H * yv;
      const double yHy = yv.dot(Hy);
      H.noalias() += rho * rho * (sy + yHy) * (s * s.transpose());
      H.noalias() += rho * (Hy * s.transpose() + s * Hy.transpose());
    }

    res.x = x_new;
    f = f_new;
    grad = grad_new;
  }

  res.value = f;
  res.iterations = iter;
  res.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
  if (std::isfinite(f) && res.grad_inf_norm <= settings.grad_tol) res.converged = true;
  return res;
}

}  // namespace bayal

#endif  // BAYAL_OPTIMIZE_HPP_
