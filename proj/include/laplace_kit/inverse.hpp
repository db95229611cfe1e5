#pragma once

#include "laplace_kit/certificate.hpp"
#include "laplace_kit/common.hpp"
#include "laplace_kit/geometry.hpp"
#include "laplace_kit/objective.hpp"
#include "laplace_kit/remainders.hpp"
#include "laplace_kit/solver.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace laplace_kit {

// m : R^p -> R^n, componentwise with derivatives; higher directional
// derivatives of each m_i fall back to stencils
struct ForwardMap {
  int p = 0;
  int n = 0;
  std::function<double(int, const Vec&)> component_fn;
  std::function<Vec(int, const Vec&)> component_grad;
  std::function<Mat(int, const Vec&)> component_hess;  // optional
  // optional analytic <grad^k m_i(x), u^k>, k in {3,4}
  std::function<double(int, const Vec&, const Vec&, int)> component_dir_deriv;
  double deriv_scale = 1.0;

  double dir_deriv(int i, const Vec& x, const Vec& u, int order) const;
};

struct InverseProblemSpec {
  ForwardMap forward;
  Vec data;         // z
  Vec prior_mean;   // x0
  Mat prior_precision;  // G^2
  double deviation_x = 4.0;
};

struct RegularityConstants {
  double c2_hat = 0.0;  // C2
  double cn_hat = 0.0;  // C_n
  double c0_hat = 1.0;  // C0 >= 1
  double cg_hat = 1.0;  // C_G
  double c3_hat = 0.0;  // C3
  std::optional<double> c4_hat;  // C4
  double rho0 = 0.0;
  double r0 = 0.0;
  double delta = 0.0;  // C2 (rho0 + 2 r0 C_n C0 / sqrt(n))
  int samples = 0;
  std::uint64_t seed = 0;
  bool is_sup_estimate = true;
  int skipped_directions = 0;
};

double loss(const InverseProblemSpec& spec, const Vec& x);  // -||z - m(x)||^2 / 2
Mat breve_d2(const InverseProblemSpec& spec, const Vec& x); // sum grad m_i grad m_i^t
Mat fisher(const InverseProblemSpec& spec, const Vec& x);   // breve_d2 + sum (m_i - z_i) grad^2 m_i
double x0_radius(const InverseProblemSpec& spec);           // r0 with Q = breve D at x0
bool in_x0(const InverseProblemSpec& spec, double r0, const Vec& x);

// the likelihood as a model-core objective (analytic derivatives when the
// forward map has them)
Objective loss_objective(const InverseProblemSpec& spec);
PenalizedObjective penalized_objective(const InverseProblemSpec& spec);

RegularityConstants estimate_constants(const InverseProblemSpec& spec, double r0, int n_points,
                                       int n_dirs, std::uint64_t seed);

struct ConditionReport {
  struct Line {
    std::string name;
    std::string inequality;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = true;
  };
  std::vector<Line> lines;
  double rho0 = 0.0;
  double delta = 0.0;
  bool all_pass = true;
};
ConditionReport check_conditions(const InverseProblemSpec& spec, RegularityConstants& consts);

struct ConcavityReport {
  double min_gen_eig = 1.0;
  double threshold = 1.0;  // 1 - delta
  int samples = 0;
  bool pass = true;
};
ConcavityReport concavity_margin_check(const InverseProblemSpec& spec,
                                       const RegularityConstants& consts, int n_points,
                                       std::uint64_t seed);

// c3 = 4 C_G^{3/2} C3 C_n, c4 = 8 C_G^2 C4 C_n
SelfConcordance nl_self_concordance(const RegularityConstants& consts, double n);

LaplaceCertificate nl_certificate(const InverseProblemSpec& spec,
                                  const RegularityConstants& consts, const MapResult& map,
                                  const CertificateOptions& opts = {});

// synthetic generator: data z = m(xbar) + sigma eps
struct SyntheticProblem {
  InverseProblemSpec spec;
  Vec x_true;
};
SyntheticProblem make_synthetic(const std::string& family, int p, int n, double sigma,
                                std::uint64_t seed);

}  // namespace laplace_kit
