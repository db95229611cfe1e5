#pragma once

#include "laplace_kit/common.hpp"

#include <functional>
#include <optional>

namespace laplace_kit {

// A smooth log-density-like function. Derivatives resolve analytic-first
// with finite-difference fallback; which path was taken is observable via
// has_analytic_* so certificates can carry provenance.
struct Objective {
  int dim = 0;
  std::function<double(const Vec&)> value_fn;
  std::function<Vec(const Vec&)> gradient_fn;    // optional
  std::function<Mat(const Vec&)> hessian_fn;     // optional
  // optional analytic <grad^k f(x), u^k> for k in {3,4}
  std::function<double(const Vec&, const Vec&, int)> dir_deriv_fn;
  double deriv_scale = 1.0;

  bool has_analytic_gradient() const { return static_cast<bool>(gradient_fn); }
  bool has_analytic_hessian() const { return static_cast<bool>(hessian_fn); }
  bool has_analytic_dir_deriv() const { return static_cast<bool>(dir_deriv_fn); }
};

double evaluate(const Objective& obj, const Vec& x);
Vec gradient(const Objective& obj, const Vec& x);
Mat hessian(const Objective& obj, const Vec& x);
// order in {3,4}: k-th derivative of t -> f(x + t u) at t = 0
double directional_derivative(const Objective& obj, const Vec& x, const Vec& u, int order);

enum class DerivMethod { analytic, finite_difference };

struct DirectionalTaylor {
  Vec base_point;
  Vec direction;
  double k3 = 0.0;
  std::optional<double> k4;
  DerivMethod method = DerivMethod::finite_difference;
};

DirectionalTaylor directional_taylor(const Objective& obj, const Vec& x, const Vec& u,
                                     bool want_fourth);

// f(x) = l(x) - ||G (x - x0)||^2 / 2
struct PenalizedObjective {
  Objective likelihood;
  Mat penalty_precision;  // G^2, symmetric PSD
  Vec prior_mean;         // x0
  std::optional<double> sample_size_hint;  // n when -l = n h

  // the assembled objective for f itself
  Objective total() const;
};

PenalizedObjective penalize(Objective likelihood, Mat g2, Vec x0);

}  // namespace laplace_kit
