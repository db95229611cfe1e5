#pragma once

#include "laplace_kit/common.hpp"
#include "laplace_kit/objective.hpp"

namespace laplace_kit {

struct SolverOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-9;
  double initial_damping = 1e-12;
  double armijo_c = 1e-4;
  double step_shrink = 0.5;
  // nonlinear inverse problems may ask for the always-PSD Gauss-Newton
  // surrogate grad m grad m^t + G^2 instead of the full Hessian; when set,
  // curvature_override supplies the Newton matrix (a positive surrogate
  // for -grad^2 f)
  bool gauss_newton_surrogate = false;
  std::function<Mat(const Vec&)> curvature_override;
  // skip the SPD check on -grad^2 f(x*) (used by auxiliary subsolves whose
  // curvature at the optimum may be semidefinite)
  bool check_curvature = true;
};

struct MapResult {
  Vec x_star;
  Mat neg_hessian;             // D_G^2 = -grad^2 f(x*)
  Mat likelihood_neg_hessian;  // D^2 = D_G^2 - G^2
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

MapResult find_map(const PenalizedObjective& f, const Vec& x_init,
                   const SolverOptions& opts = {});

}  // namespace laplace_kit
