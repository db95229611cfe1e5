#pragma once

#include "laplace_kit/common.hpp"
#include "laplace_kit/geometry.hpp"
#include "laplace_kit/objective.hpp"
#include "laplace_kit/remainders.hpp"
#include "laplace_kit/solver.hpp"

#include <map>
#include <optional>
#include <string>

namespace laplace_kit {

// --- error terms ------------------------------------------------------------

double diamond2(double omega, double p_g);                      // 0.75 w p_G / (1 - w)
double diamond3(double e_tau3, double omega);                   // E tau3 / (4 (1-w)^{3/2})
double diamond4(double third_form_sq, double e_tau4, double omega);
double diamond3_univariate(double f3bar, double dd);            // 0.7 |f3| / D^3
double diamond4_univariate(double kappa3, double kappa4, double omega, double dd);

// --- bounds -----------------------------------------------------------------

struct BoundWithGate {
  double bound = 0.0;
  bool gate = true;
};

BoundWithGate tv_bound(double diamond, double x, double omega, double p_g);
BoundWithGate tv_bound_sc(double c3, double p_g, double n, double x);
BoundWithGate tv_bound_symmetric_sc(double c3, double c4, double p_g, double n, double x);

struct ConcentrationBound {
  double coarse = 1.0;   // e^{-x}
  double refined = 1.0;  // 4 e^{-x - (1-w) p_G / 2}
  bool gate = true;      // w <= 1/3
};
ConcentrationBound concentration_bound(double omega, double p_g, double x);

struct TailRho {
  double rho = 1.0;    // 4 e^{-x - p_G/2}
  double rho_g = 1.0;  // e^{-x - p_G/2}
};
TailRho tail_rho_bounds(double p_g, double x);

struct SandwichResult {
  double bound = 0.0;
  bool valid = true;  // false -> bound is +inf sentinel
};
// 2 (rho* + dia) / (1 - rho* - dia), rho* = max(rho, rho_g);
// needs dia + rho* <= 1/2 and dia_g <= dia
SandwichResult sandwich(double diamond, double diamond_g, double rho, double rho_g);

BoundWithGate kl_forward_bound(double diamond3, double x);
double kl_reverse_bound(double c3, double p_g, double n, double x, double c_ell);
double mean_shift_bound(double c3, double p_g, double n, double x, double q_dg2_qt_opnorm,
                        double big_c);

double gaussian_kl(const Vec& mean1, const Mat& prec1, const Vec& mean2, const Mat& prec2);
double gaussian_tv_pinsker(double kl);

struct GaussianComparison {
  double value = 0.0;
  bool gate1 = true;  // 3 ||Sigma_1||^2 <= ||Sigma_1||_Fr^2
  bool gate2 = true;
};
GaussianComparison gaussian_comparison_d(const Mat& sigma1, const Mat& sigma2, const Vec& a,
                                         bool use_wh);

struct InexactTv {
  double total = 0.0;
  double local = 0.0;          // 4 (dia + e^{-x})
  double gaussian_pinsker = 0.0;
  std::optional<double> gaussian_eigen;  // present when ||B_G|| <= 2/3
  double gaussian_term = 0.0;  // min of the available Gaussian TV terms
};
InexactTv inexact_tv_bound(double diamond, double x, const Vec& center_used, const Mat& prec_used,
                           const Vec& center_star, const Mat& prec_star);

double posterior_mean_center_bound(double diamond3, double x, double mean_shift,
                                   double q_dg2_qt_frnorm, double big_c);

// --- the assembled certificate ------------------------------------------------

struct Gate {
  bool pass = true;
  std::string inequality;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct CertificateOptions {
  double deviation_x = 4.0;
  double nu = 2.0 / 3.0;
  double big_c = 1.0;    // unspecified absolute constant, flagged
  double c_ell = 1.0;    // model-dependent reverse-KL constant, flagged
  double omega_inflation = 1.25;  // applied to the sampled-sup omega
};

struct LaplaceCertificate {
  // meta
  std::string model_id;
  std::uint64_t seed = 0;
  bool conditional_on_x0 = false;
  std::vector<std::string> warnings;

  // geometry
  Vec center;
  double p_g = 0.0, r_g = 0.0, x = 4.0, nu = 2.0 / 3.0;

  // remainders
  double omega = 0.0;
  std::string omega_grade = "estimated";  // or "analytic"
  double omega_raw = 0.0;                 // before inflation
  double c3 = 0.0;
  std::optional<double> c4;
  double n = 1.0;

  // error terms
  std::optional<double> diamond2, diamond3, diamond4;

  // bounds (raw; probability-valued ones also carry a clamped copy in JSON)
  double tv_bound_all_sets = 1.0;
  std::optional<double> tv_bound_sc;
  std::optional<double> tv_bound_symmetric_sets;
  std::optional<double> kl_forward, kl_reverse, mean_shift;
  double tail_rho = 1.0, tail_rho_g = 1.0;
  double concentration = 1.0;          // coarse e^{-x}
  double concentration_refined = 1.0;  // 4 e^{-x-(1-w)p_G/2}

  bool contains_unspecified_constant = false;

  std::map<std::string, Gate> gates;
  std::map<std::string, std::string> provenance;

  bool all_gates_pass() const {
    for (const auto& [k, g] : gates)
      if (!g.pass) return false;
    return true;
  }
};

LaplaceCertificate build_certificate(const PenalizedObjective& f, const MapResult& map,
                                     const SelfConcordance& sc, const RemainderReport& report,
                                     const CertificateOptions& opts = {});

}  // namespace laplace_kit
