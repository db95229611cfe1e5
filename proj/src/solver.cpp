#include "laplace_kit/solver.hpp"

#include "laplace_kit/geometry.hpp"

#include <cmath>
#include <limits>

namespace laplace_kit {

MapResult find_map(const PenalizedObjective& f, const Vec& x_init, const SolverOptions& opts) {
  const Objective total = f.total();
  require_dim(x_init, total.dim, "find_map: x_init");

  Vec x = x_init;
  double fx = evaluate(total, x);
  double mu = opts.initial_damping;
  MapResult res;

  auto newton_matrix = [&](const Vec& at) -> Mat {
    if (opts.gauss_newton_surrogate && opts.curvature_override) {
      return opts.curvature_override(at);
    }
    return -hessian(total, at);
  };

  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const Vec g = gradient(total, x);
    res.grad_norm = g.norm();
    if (res.grad_norm <= opts.gradient_tolerance) {
      res.converged = true;
      break;
    }
    const Mat h = newton_matrix(x);  // positive near a maximum
    bool accepted = false;
    for (int damp = 0; damp < 60 && !accepted; ++damp) {
      Mat m = h;
      m.diagonal().array() += mu;
      Eigen::LLT<Mat> llt(m);
      if (llt.info() != Eigen::Success) {
        mu = std::max(mu * 10.0, 1e-12);
        continue;
      }
      const Vec step = llt.solve(g);
      // backtracking Armijo on the ascent direction
      double t = 1.0;
      for (int ls = 0; ls < 60; ++ls) {
        const Vec cand = x + t * step;
        double fc;
        try {
          fc = evaluate(total, cand);
        } catch (const DomainError&) {
          t *= opts.step_shrink;
          continue;
        }
        // accept on sufficient increase, or when the expected gain is below
        // floating-point resolution of f near the optimum (the Armijo test
        // cannot be evaluated reliably there and would stall the iteration)
        const double gain = opts.armijo_c * t * g.dot(step);
        const double noise = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fx));
        if (fc >= fx + gain || (gain <= noise && fc >= fx - noise)) {
          x = cand;
          fx = fc;
          accepted = true;
          mu = std::max(mu * 0.3, 1e-12);
          break;
        }
        t *= opts.step_shrink;
      }
      if (!accepted) mu = std::max(mu * 10.0, 1e-12);
    }
    if (!accepted) break;  // stalled: report best iterate, converged=false
  }

  res.x_star = x;
  res.iterations = it;
  if (!res.converged) res.grad_norm = gradient(total, x).norm();
  res.neg_hessian = -hessian(total, x);
  res.neg_hessian = 0.5 * (res.neg_hessian + res.neg_hessian.transpose());
  res.likelihood_neg_hessian = res.neg_hessian - f.penalty_precision;
  if (res.converged && opts.check_curvature) {
    try {
      chol_spd(res.neg_hessian, "find_map curvature");
    } catch (const SingularPrecision&) {
      throw IndefiniteAtOptimum("-grad^2 f(x*) is not SPD after jitter");
    }
  }
  return res;
}

}  // namespace laplace_kit
