#include "laplace_kit/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace laplace_kit {

namespace {
void require_omega(double omega, double cap = 1.0) {
  if (!(omega >= 0.0 && omega < cap)) {
    throw OmegaOutOfRange("omega must be in [0, " + std::to_string(cap) + ")");
  }
}
}  // namespace

double diamond2(double omega, double p_g) {
  require_omega(omega);
  return 0.75 * omega * p_g / (1.0 - omega);
}

double diamond3(double e_tau3, double omega) {
  require_omega(omega);
  if (e_tau3 < 0) throw PreconditionViolated("e_tau3 >= 0");
  return e_tau3 / (4.0 * std::pow(1.0 - omega, 1.5));
}

double diamond4(double third_form_sq, double e_tau4, double omega) {
  require_omega(omega);
  if (third_form_sq < 0 || e_tau4 < 0) throw PreconditionViolated("inputs >= 0");
  return (third_form_sq + 2.0 * e_tau4) / (16.0 * (1.0 - omega) * (1.0 - omega));
}

double diamond3_univariate(double f3bar, double dd) {
  if (!(dd > 0)) throw PreconditionViolated("dd > 0");
  return 0.7 * std::abs(f3bar) / (dd * dd * dd);
}

double diamond4_univariate(double kappa3, double kappa4, double omega, double dd) {
  if (!(dd > 0)) throw PreconditionViolated("dd > 0");
  if (omega > 1.0 / 3.0 + 1e-15) throw OmegaOutOfRange("omega <= 1/3 required");
  require_omega(omega);
  const double t3 = 5.0 * kappa3 * kappa3 / (12.0 * std::pow(1.0 - omega, 3.5));
  const double t4 = kappa4 / (4.0 * std::pow(1.0 - omega, 2.5));
  return (t3 + t4) / (dd * dd);
}

BoundWithGate tv_bound(double diamond, double x, double omega, double p_g) {
  if (diamond < 0) throw PreconditionViolated("diamond >= 0");
  BoundWithGate b;
  b.bound = std::min(1.0, 4.0 * (diamond + std::exp(-x)));
  b.gate = omega * p_g <= 2.0 / 3.0;
  return b;
}

BoundWithGate tv_bound_sc(double c3, double p_g, double n, double x) {
  if (!(n > 0)) throw PreconditionViolated("n > 0");
  BoundWithGate b;
  b.bound = 2.0 * c3 * std::sqrt(std::pow(p_g + 1.0, 3.0) / n) + 4.0 * std::exp(-x);
  b.gate = c3 * concentration_radius(p_g, x) / std::sqrt(n) <= 0.75;
  return b;
}

BoundWithGate tv_bound_symmetric_sc(double c3, double c4, double p_g, double n, double x) {
  if (!(n > 0)) throw PreconditionViolated("n > 0");
  BoundWithGate b;
  b.bound = (c3 * c3 * std::pow(p_g + 2.0, 3.0) + 2.0 * c4 * (p_g + 1.0) * (p_g + 1.0)) /
                (2.0 * n) +
            4.0 * std::exp(-x);
  b.gate = c3 * concentration_radius(p_g, x) / std::sqrt(n) <= 0.75;
  return b;
}

ConcentrationBound concentration_bound(double omega, double p_g, double x) {
  ConcentrationBound c;
  c.coarse = std::exp(-x);
  c.refined = 4.0 * std::exp(-x - 0.5 * (1.0 - omega) * p_g);
  c.gate = omega <= 1.0 / 3.0;
  return c;
}

TailRho tail_rho_bounds(double p_g, double x) {
  TailRho t;
  t.rho = 4.0 * std::exp(-x - 0.5 * p_g);
  t.rho_g = std::exp(-x - 0.5 * p_g);
  return t;
}

SandwichResult sandwich(double diamond, double diamond_g, double rho, double rho_g) {
  SandwichResult s;
  const double rho_star = std::max(rho, rho_g);
  if (diamond + rho_star > 0.5 + 1e-15 || diamond_g > diamond + 1e-15) {
    s.valid = false;
    s.bound = std::numeric_limits<double>::infinity();
    return s;
  }
  s.bound = 2.0 * (rho_star + diamond) / (1.0 - rho_star - diamond);
  return s;
}

BoundWithGate kl_forward_bound(double dia3, double x) {
  if (dia3 < 0) throw PreconditionViolated("diamond3 >= 0");
  BoundWithGate b;
  b.bound = 4.0 * dia3 + 4.0 * std::exp(-x);
  b.gate = b.bound <= 1.0;
  return b;
}

double kl_reverse_bound(double c3, double p_g, double n, double x, double c_ell) {
  if (!(n > 0)) throw PreconditionViolated("n > 0");
  return c3 * std::sqrt(std::pow(p_g + 1.0, 3.0) / n) + (2.0 + c_ell) * std::exp(-x);
}

double mean_shift_bound(double c3, double p_g, double n, double x, double q_dg2_qt_opnorm,
                        double big_c) {
  if (!(n > 0)) throw PreconditionViolated("n > 0");
  return 2.4 * c3 * std::sqrt(q_dg2_qt_opnorm) * std::pow(p_g + 1.0, 1.5) / std::sqrt(n) +
         big_c * std::exp(-x);
}

double gaussian_kl(const Vec& mean1, const Mat& prec1, const Vec& mean2, const Mat& prec2) {
  const auto n = mean1.size();
  if (mean2.size() != n || prec1.rows() != n || prec2.rows() != n) {
    throw DimensionMismatch("gaussian_kl inputs");
  }
  const Eigen::LLT<Mat> l1 = chol_spd(prec1, "gaussian_kl prec1");
  const Eigen::LLT<Mat> l2 = chol_spd(prec2, "gaussian_kl prec2");
  // tr(S2^{-1} S1) = tr(prec2 prec1^{-1})
  const Mat p2_p1inv = l1.solve(prec2).transpose();
  const double trace_term = p2_p1inv.trace();
  const Vec dm = mean2 - mean1;
  const double quad = dm.dot(prec2 * dm);
  double logdet1 = 0.0, logdet2 = 0.0;
  const Mat l1m = l1.matrixL();
  const Mat l2m = l2.matrixL();
  for (Eigen::Index i = 0; i < n; ++i) {
    logdet1 += 2.0 * std::log(l1m(i, i));
    logdet2 += 2.0 * std::log(l2m(i, i));
  }
  // ln det(S2 S1^{-1}) = ln det(prec1) - ln det(prec2)
  const double kl = 0.5 * (trace_term - n + quad + (logdet1 - logdet2));
  return std::max(0.0, kl);
}

double gaussian_tv_pinsker(double kl) {
  if (kl < 0) throw PreconditionViolated("kl >= 0");
  return std::min(1.0, std::sqrt(kl / 2.0));
}

GaussianComparison gaussian_comparison_d(const Mat& sigma1, const Mat& sigma2, const Vec& a,
                                         bool use_wh) {
  GaussianComparison g;
  const double fr1 = sigma1.norm();
  const double fr2 = sigma2.norm();
  if (!(fr1 > 0) || !(fr2 > 0)) throw PreconditionViolated("Frobenius norms must be positive");
  Eigen::SelfAdjointEigenSolver<Mat> es1(sigma1), es2(sigma2);
  double lambda_term;
  if (use_wh) {
    Eigen::SelfAdjointEigenSolver<Mat> esd(Mat(sigma1 - sigma2), Eigen::EigenvaluesOnly);
    lambda_term = esd.eigenvalues().cwiseAbs().sum();  // trace norm of the difference
  } else {
    lambda_term = (es1.eigenvalues() - es2.eigenvalues()).cwiseAbs().sum();
  }
  g.value = (1.0 / fr1 + 1.0 / fr2) * (lambda_term + a.squaredNorm());
  const double tol = 16.0 * std::numeric_limits<double>::epsilon();
  const double op1 = es1.eigenvalues().cwiseAbs().maxCoeff();
  const double op2 = es2.eigenvalues().cwiseAbs().maxCoeff();
  g.gate1 = 3.0 * op1 * op1 <= sigma1.squaredNorm() * (1.0 + tol);
  g.gate2 = 3.0 * op2 * op2 <= sigma2.squaredNorm() * (1.0 + tol);
  return g;
}

InexactTv inexact_tv_bound(double diamond, double x, const Vec& center_used, const Mat& prec_used,
                           const Vec& center_star, const Mat& prec_star) {
  InexactTv r;
  r.local = std::min(1.0, 4.0 * (diamond + std::exp(-x)));
  const double kl = gaussian_kl(center_used, prec_used, center_star, prec_star);
  r.gaussian_pinsker = gaussian_tv_pinsker(kl);
  r.gaussian_term = r.gaussian_pinsker;

  // explicit term (1/2)(||D_G (x - x*)|| + sqrt(tr B_G^2)) with
  // B_G = I - D_G^{-1} D^2 D_G^{-1}-style mismatch; applicable when the
  // relative curvature mismatch has operator norm <= 2/3
  const Eigen::LLT<Mat> lstar = chol_spd(prec_star, "inexact prec_star");
  const Mat l = lstar.matrixL();
  Mat li_pu = l.triangularView<Eigen::Lower>().solve(prec_used);
  Mat rel = l.triangularView<Eigen::Lower>().solve(Mat(li_pu.transpose())).transpose();
  Mat b_mismatch = Mat::Identity(rel.rows(), rel.cols()) - 0.5 * (rel + rel.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(b_mismatch);
  if (es.eigenvalues().cwiseAbs().maxCoeff() <= 2.0 / 3.0) {
    const Mat dg = spd_sqrt(prec_star);
    const double shift = (dg * (center_used - center_star)).norm();
    const double tr_b2 = es.eigenvalues().squaredNorm();
    r.gaussian_eigen = 0.5 * (shift + std::sqrt(tr_b2));
    r.gaussian_term = std::min(r.gaussian_term, *r.gaussian_eigen);
  }
  r.total = r.local + r.gaussian_term;
  return r;
}

double posterior_mean_center_bound(double dia3, double x, double mean_shift,
                                   double q_dg2_qt_frnorm, double big_c) {
  if (!(q_dg2_qt_frnorm > 0)) throw PreconditionViolated("frnorm > 0");
  return 4.0 * (dia3 + std::exp(-x)) + big_c * mean_shift * mean_shift / q_dg2_qt_frnorm;
}

LaplaceCertificate build_certificate(const PenalizedObjective& f, const MapResult& map,
                                     const SelfConcordance& sc, const RemainderReport& report,
                                     const CertificateOptions& opts) {
  if (!map.converged) throw PreconditionViolated("build_certificate needs a converged MAP");

  PrecisionPair pair = PrecisionPair::from_curvatures(map.likelihood_neg_hessian,
                                                      f.penalty_precision);
  LaplaceCertificate cert;
  cert.center = map.x_star;
  cert.p_g = effective_dimension(pair);
  cert.x = opts.deviation_x;
  cert.nu = opts.nu;
  cert.r_g = concentration_radius(cert.p_g, cert.x);

  cert.omega_raw = report.omega;
  const double inflation = report.is_sup_estimate ? opts.omega_inflation : 1.0;
  cert.omega = std::min(report.omega * inflation, 1.0 - 1e-12);
  cert.omega_grade = report.is_sup_estimate ? "estimated" : "analytic";
  cert.c3 = sc.c3;
  cert.c4 = sc.c4;
  cert.n = sc.n;

  const TauBounds tb = tau_moment_bounds(sc, cert.p_g);
  cert.diamond2 = diamond2(cert.omega, cert.p_g);
  cert.diamond3 = diamond3(tb.e_tau3, cert.omega);
  if (sc.c4) cert.diamond4 = diamond4(tb.third_form_sq, tb.e_tau4, cert.omega);

  const double dia = std::min(*cert.diamond2, *cert.diamond3);
  const BoundWithGate tv = tv_bound(dia, cert.x, cert.omega, cert.p_g);
  cert.tv_bound_all_sets = tv.bound;
  const BoundWithGate tvsc = tv_bound_sc(cert.c3, cert.p_g, cert.n, cert.x);
  cert.tv_bound_sc = tvsc.bound;
  if (sc.c4) {
    cert.tv_bound_symmetric_sets =
        std::min(tv_bound(*cert.diamond4, cert.x, cert.omega, cert.p_g).bound,
                 tv_bound_symmetric_sc(cert.c3, *sc.c4, cert.p_g, cert.n, cert.x).bound);
  }

  const BoundWithGate klf = kl_forward_bound(*cert.diamond3, cert.x);
  cert.kl_forward = klf.bound;
  cert.kl_reverse = kl_reverse_bound(cert.c3, cert.p_g, cert.n, cert.x, opts.c_ell);

  // Q = D specialization: ||D D_G^{-2} D|| = ||B_G|| <= 1
  Eigen::SelfAdjointEigenSolver<Mat> esb(pair.b_matrix, Eigen::EigenvaluesOnly);
  const double opb = std::min(1.0, std::max(0.0, esb.eigenvalues().maxCoeff()));
  cert.mean_shift = mean_shift_bound(cert.c3, cert.p_g, cert.n, cert.x, opb, opts.big_c);

  const TailRho tr = tail_rho_bounds(cert.p_g, cert.x);
  cert.tail_rho = tr.rho;
  cert.tail_rho_g = tr.rho_g;
  const ConcentrationBound cb = concentration_bound(cert.omega, cert.p_g, cert.x);
  cert.concentration = cb.coarse;
  cert.concentration_refined = cb.refined;

  cert.contains_unspecified_constant = true;  // big_c and c_ell enter above

  auto gate = [&](const std::string& name, double lhs, double rhs, const std::string& ineq) {
    cert.gates[name] = Gate{lhs <= rhs, ineq, lhs, rhs};
  };
  gate("omega_third", cert.omega, 1.0 / 3.0, "omega <= 1/3");
  gate("omega_pg", cert.omega * cert.p_g, 2.0 / 3.0, "omega*p_G <= 2/3");
  gate("sc_radius", cert.c3 * cert.r_g / std::sqrt(cert.n), 0.75, "c3*r_G/sqrt(n) <= 3/4");
  gate("kl_forward", klf.bound, 1.0, "4*diamond3 + 4*exp(-x) <= 1");

  cert.provenance["omega"] = report.is_sup_estimate
                                 ? "sampled sup of 2|delta3|/||Du||^2 over U, inflated x" +
                                       std::to_string(opts.omega_inflation)
                                 : "analytic";
  cert.provenance["c3"] = sc.source == SelfConcordance::Source::nl_constants
                              ? "4*C_G^{3/2}*C3*C_n from forward-map constants"
                              : "sampled sup |<grad^3 h,u^3>| / <grad^2 h,u^2>^{3/2}";
  cert.provenance["diamond2"] = "0.75*omega*p_G/(1-omega)";
  cert.provenance["diamond3"] = "E.tau3 bound c3*(p_G+1)^{3/2}/sqrt(n) over 4(1-omega)^{3/2}";
  if (sc.c4) cert.provenance["diamond4"] = "(c3^2 (p_G+2)^3/n + 2 c4 (p_G+1)^2/n)/(16(1-omega)^2)";
  cert.provenance["tv_bound_all_sets"] = "min(1, 4(min(diamond2,diamond3)+exp(-x)))";
  cert.provenance["tv_bound_sc"] = "2*c3*sqrt((p_G+1)^3/n) + 4*exp(-x)";
  if (sc.c4) {
    cert.provenance["tv_bound_symmetric_sets"] =
        "min(4(diamond4+exp(-x)), (c3^2(p_G+2)^3+2c4(p_G+1)^2)/(2n)+4exp(-x))";
  }
  cert.provenance["kl_forward"] = "4*diamond3 + 4*exp(-x)";
  cert.provenance["kl_reverse"] =
      "c3*sqrt((p_G+1)^3/n) + (2+C_l)*exp(-x), C_l unspecified-constant";
  cert.provenance["mean_shift"] =
      "2.4*c3*||D D_G^{-2} D||^{1/2}*(p_G+1)^{3/2}/sqrt(n) + C*exp(-x), C unspecified-constant";
  cert.provenance["tail_rho"] = "4*exp(-x-p_G/2)";
  cert.provenance["tail_rho_g"] = "exp(-x-p_G/2)";
  cert.provenance["concentration"] = "exp(-x)";
  cert.provenance["concentration_refined"] = "4*exp(-x-(1-omega)*p_G/2)";

  return cert;
}

}  // namespace laplace_kit
