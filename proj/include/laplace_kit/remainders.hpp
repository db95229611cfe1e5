#pragma once

#include "laplace_kit/common.hpp"
#include "laplace_kit/geometry.hpp"
#include "laplace_kit/objective.hpp"

#include <cstdint>
#include <optional>

namespace laplace_kit {

// Bregman divergence f(x; u) = f(x + u) - f(x) - <grad f(x), u>
double bregman(const Objective& f, const Vec& x, const Vec& u);

// delta3 = f(x; u) - <grad^2 f(x), u^2> / 2
double delta3(const Objective& f, const Vec& x, const Vec& u);
// delta4 = delta3 - <grad^3 f(x), u^3> / 6
double delta4(const Objective& f, const Vec& x, const Vec& u);

struct RemainderReport {
  double omega = 0.0;  // sampled sup of 2 |delta3(x*, u)| / ||D u||^2 over U
  double alpha = 0.0;  // sampled sup of |<grad^3 f, u^3>| / ||D u||^2 over U
  int directions_used = 0;
  int line_points_used = 0;
  Vec sup_attained_at;
  bool is_sup_estimate = true;  // always: the sup is sampled, not certified
};

RemainderReport estimate_omega(const Objective& f, const LocalGeometry& geom, int n_dirs,
                               int n_line, std::uint64_t seed);
double estimate_alpha(const Objective& f, const LocalGeometry& geom, int n_dirs, int n_line,
                      std::uint64_t seed);

struct SelfConcordance {
  double c3 = 0.0;
  std::optional<double> c4;
  double n = 1.0;  // the scale with -l = n h
  enum class Source { estimated_sup, analytic, nl_constants };
  Source source = Source::estimated_sup;
  bool is_sup_estimate = true;
};

// sampled sup over U of |<grad^3 h(x*+tu), u^3>| / <grad^2 h(x*), u^2>^{3/2}
// (and the 4th-order analogue with power 2) for h = -l / n
SelfConcordance estimate_self_concordance(const Objective& h, const LocalGeometry& geom, double n,
                                          int n_dirs, int n_line, std::uint64_t seed,
                                          bool want_fourth);

struct TauBounds {
  double e_tau3 = 0.0;         // c3 n^{-1/2} (p_G + 1)^{3/2}
  double e_tau4 = 0.0;         // c4 n^{-1} (p_G + 1)^2
  double third_form_sq = 0.0;  // c3^2 (p_G + 2)^3 / n
};
TauBounds tau_moment_bounds(const SelfConcordance& sc, double p_g);

struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};
// Monte-Carlo E tau_k(gamma_G) with tau3 = c3 n^{-1/2} ||D u||^3,
// tau4 = c4 n^{-1} ||D u||^4
McEstimate tau_moment_mc(const PrecisionPair& pair, const SelfConcordance& sc, int order,
                         int samples, std::uint64_t seed);

}  // namespace laplace_kit
