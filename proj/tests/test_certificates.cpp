#include "laplace_kit/certificate.hpp"
#include "laplace_kit/models.hpp"

#include <doctest.h>

#include <cmath>

using namespace laplace_kit;

TEST_CASE("diamond terms: substitution oracles") {
  // 0.75 w p_G / (1 - w) at w = 0.2, p_G = 4 -> 0.75
  CHECK(diamond2(0.2, 4.0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(diamond2(0.0, 7.0) == doctest::Approx(0.0));
  // E tau3 / (4 (1-w)^{3/2}) at E tau3 = 1, w = 0 -> 0.25
  CHECK(diamond3(1.0, 0.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(diamond3(0.8, 0.19) ==
        doctest::Approx(0.8 / (4.0 * std::pow(0.81, 1.5))).epsilon(1e-12));
  // (third_form_sq + 2 E tau4) / (16 (1-w)^2)
  CHECK(diamond4(1.0, 0.5, 0.0) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(diamond4(2.0, 1.0, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
  // univariate: 0.7 |f3| / D^3
  CHECK(diamond3_univariate(0.1, 1.0) == doctest::Approx(0.07).epsilon(1e-12));
  CHECK(diamond3_univariate(-0.1, 2.0) == doctest::Approx(0.7 * 0.1 / 8.0).epsilon(1e-12));
  // univariate 4th order with kappa4 = 0, w = 0, D = 1 -> 5 k3^2 / 12
  CHECK(diamond4_univariate(0.2, 0.0, 0.0, 1.0) ==
        doctest::Approx(5.0 * 0.04 / 12.0).epsilon(1e-12));
  CHECK(diamond4_univariate(0.0, 0.3, 0.0, 1.0) == doctest::Approx(0.075).epsilon(1e-12));
}

TEST_CASE("tv_bound: formula, clamp behaviour, gate") {
  const auto b = tv_bound(0.05, 4.0, 0.1, 2.0);
  CHECK(b.bound == doctest::Approx(4.0 * (0.05 + std::exp(-4.0))).epsilon(1e-12));
  CHECK(b.gate);  // w p_G = 0.2 <= 2/3
  const auto big = tv_bound(10.0, 4.0, 0.1, 2.0);
  CHECK(big.bound == doctest::Approx(1.0));  // min with 1
  const auto gated = tv_bound(0.05, 4.0, 0.3, 3.0);  // w p_G = 0.9 > 2/3
  CHECK(!gated.gate);
}

TEST_CASE("tv_bound_sc and symmetric variant: substitution oracles") {
  const double c3 = 1.0, p_g = 3.0, n = 100.0, x = 4.0;
  const auto sc = tv_bound_sc(c3, p_g, n, x);
  CHECK(sc.bound ==
        doctest::Approx(2.0 * c3 * std::sqrt(64.0 / n) + 4.0 * std::exp(-x)).epsilon(1e-12));
  // gate: c3 r_G / sqrt(n) <= 3/4 with r_G = 2 sqrt(3) + sqrt(8)
  const double r_g = 2.0 * std::sqrt(3.0) + std::sqrt(8.0);
  CHECK(sc.gate == (c3 * r_g / std::sqrt(n) <= 0.75));

  const double c4 = 0.5;
  const auto sym = tv_bound_symmetric_sc(c3, c4, p_g, n, x);
  const double expect =
      (c3 * c3 * std::pow(p_g + 2.0, 3.0) + 2.0 * c4 * std::pow(p_g + 1.0, 2.0)) / (2.0 * n) +
      4.0 * std::exp(-x);
  CHECK(sym.bound == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("concentration and tail rho bounds") {
  const auto c = concentration_bound(0.2, 4.0, 4.0);
  CHECK(c.coarse == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
  CHECK(c.refined == doctest::Approx(4.0 * std::exp(-4.0 - 0.8 * 2.0)).epsilon(1e-12));
  CHECK(c.gate);
  CHECK(!concentration_bound(0.4, 4.0, 4.0).gate);

  const auto t = tail_rho_bounds(4.0, 4.0);
  CHECK(t.rho == doctest::Approx(4.0 * std::exp(-6.0)).epsilon(1e-12));
  CHECK(t.rho_g == doctest::Approx(std::exp(-6.0)).epsilon(1e-12));
}

TEST_CASE("sandwich: interior value and boundary blow-up") {
  // dia = rho* = 0.1 -> 2 * 0.2 / 0.8 = 0.5
  const auto s = sandwich(0.1, 0.05, 0.1, 0.02);
  CHECK(s.valid);
  CHECK(s.bound == doctest::Approx(0.5).epsilon(1e-12));
  // at the admissibility boundary dia + rho* = 1/2 the bound is 2
  const auto edge = sandwich(0.3, 0.1, 0.2, 0.1);
  CHECK(edge.valid);
  CHECK(edge.bound == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(!sandwich(0.4, 0.1, 0.2, 0.1).valid);
  CHECK(!sandwich(0.1, 0.2, 0.1, 0.05).valid);  // needs dia_g <= dia
}

TEST_CASE("kl and mean-shift bounds: substitution oracles") {
  const auto fwd = kl_forward_bound(0.1, 4.0);
  CHECK(fwd.bound == doctest::Approx(4.0 * 0.1 + 4.0 * std::exp(-4.0)).epsilon(1e-12));
  CHECK(fwd.gate);
  CHECK(!kl_forward_bound(0.5, 0.1).gate);  // exceeds 1

  const double c3 = 1.0, p_g = 3.0, n = 100.0, x = 4.0, c_ell = 1.0;
  CHECK(kl_reverse_bound(c3, p_g, n, x, c_ell) ==
        doctest::Approx(std::sqrt(64.0 / n) + 3.0 * std::exp(-4.0)).epsilon(1e-12));

  const double opnorm = 2.0, big_c = 1.0;
  CHECK(mean_shift_bound(c3, p_g, n, x, opnorm, big_c) ==
        doctest::Approx(2.4 * std::sqrt(2.0) * 8.0 / 10.0 + std::exp(-4.0)).epsilon(1e-12));
}

TEST_CASE("gaussian_kl: classic values and pinsker") {
  // KL(N(0,1) || N(1,1)) = 1/2
  CHECK(gaussian_kl(Vec::Zero(1), Mat::Identity(1, 1), Vec::Ones(1), Mat::Identity(1, 1)) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(gaussian_kl(Vec::Zero(2), Mat::Identity(2, 2), Vec::Zero(2), Mat::Identity(2, 2)) ==
        doctest::Approx(0.0));
  // KL(N(0, I) || N(0, 2I)) in 3-D: (tr(1/2 I) - 3 + ln 8) / 2
  const double expect = 0.5 * (1.5 - 3.0 + std::log(8.0));
  CHECK(gaussian_kl(Vec::Zero(3), Mat::Identity(3, 3), Vec::Zero(3),
                    0.5 * Mat::Identity(3, 3)) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(gaussian_tv_pinsker(0.125) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("gaussian_comparison_d: identity-vs-scaled covariance oracle") {
  // Sigma_1 = I_3, Sigma_2 = 2 I_3, a = 0: the Frobenius-style discrepancy
  // reduces to ||Sigma_2 - Sigma_1||_Fr scaled terms; check symmetry and gates
  const auto d12 = gaussian_comparison_d(Mat::Identity(3, 3), 2.0 * Mat::Identity(3, 3),
                                         Vec::Zero(3), false);
  CHECK(d12.value > 0.0);
  CHECK(d12.gate1);  // 3 ||I||^2 = 3 <= ||I||_Fr^2 = 3
  const auto d0 = gaussian_comparison_d(Mat::Identity(3, 3), Mat::Identity(3, 3), Vec::Zero(3),
                                        false);
  CHECK(d0.value == doctest::Approx(0.0));
  // a mean offset strictly increases the discrepancy
  const auto dm = gaussian_comparison_d(Mat::Identity(3, 3), Mat::Identity(3, 3),
                                        Vec::Ones(3), false);
  CHECK(dm.value > 0.0);
}

TEST_CASE("inexact_tv_bound: 1-D mean shift, pinsker term equals sqrt(KL/2)") {
  // centers 0 and 0.5, unit precisions: KL = 1/8, pinsker = 0.25;
  // true Gaussian TV = 0.19741 < 0.25, so pinsker is a valid upper bound
  const auto r = inexact_tv_bound(0.01, 4.0, Vec::Constant(1, 0.5), Mat::Identity(1, 1),
                                  Vec::Zero(1), Mat::Identity(1, 1));
  CHECK(r.gaussian_pinsker == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.local == doctest::Approx(4.0 * (0.01 + std::exp(-4.0))).epsilon(1e-12));
  CHECK(r.gaussian_term <= 0.25 + 1e-12);
  CHECK(r.total == doctest::Approx(r.local + r.gaussian_term).epsilon(1e-12));
  CHECK(r.gaussian_term >= 0.19741 - 1e-4);  // no term may undercut the true TV
}

TEST_CASE("posterior_mean_center_bound: reduces to mean_shift plus remainder term") {
  const double v = posterior_mean_center_bound(0.1, 4.0, 0.05, 2.0, 1.0);
  CHECK(v >= 0.05);
  CHECK(std::isfinite(v));
  CHECK(posterior_mean_center_bound(0.0, 50.0, 0.0, 1.0, 1.0) ==
        doctest::Approx(0.0).epsilon(1e-10));
  CHECK_THROWS_AS((void)posterior_mean_center_bound(0.0, 4.0, 0.0, 0.0, 1.0),
                  PreconditionViolated);
}

TEST_CASE("build_certificate: gaussian-linear model is recognized as exact") {
  const auto built = build_model("gaussian-linear", {{"p", 2.0}}, 1);
  const auto res = find_map(built.objective, built.start);
  const auto pair = PrecisionPair::from_total(res.neg_hessian, built.objective.penalty_precision);
  const auto geom = make_local_geometry(res.x_star, pair);
  const auto total = built.objective.total();
  const auto rep = estimate_omega(total, geom, 64, 16, 1);
  Objective h;
  h.dim = 2;
  const Objective& lik = built.objective.likelihood;
  const double n = built.sample_size;
  h.value_fn = [&lik, n](const Vec& x) { return -evaluate(lik, x) / n; };
  h.gradient_fn = [&lik, n](const Vec& x) { return Vec(-gradient(lik, x) / n); };
  h.hessian_fn = [&lik, n](const Vec& x) { return Mat(-hessian(lik, x) / n); };
  h.dir_deriv_fn = [&lik, n](const Vec& x, const Vec& u, int order) {
    return -directional_derivative(lik, x, u, order) / n;
  };
  const auto sc = estimate_self_concordance(h, geom, n, 32, 16, 1, true);
  const auto cert = build_certificate(built.objective, res, sc, rep);

  CHECK(cert.omega <= 1e-9);
  CHECK(*cert.diamond2 <= 1e-9);
  CHECK(*cert.diamond3 <= 1e-6);
  CHECK(cert.tv_bound_all_sets <= 4.0 * std::exp(-4.0) + 1e-6);
  CHECK(cert.all_gates_pass());
  CHECK(cert.p_g == doctest::Approx(effective_dimension(pair)).epsilon(1e-12));
  CHECK(cert.r_g == doctest::Approx(concentration_radius(cert.p_g, 4.0)).epsilon(1e-12));
}

TEST_CASE("build_certificate: omega inflation and gate bookkeeping") {
  const auto built = build_model("logistic", {{"p", 1.0}, {"n", 50.0}}, 4);
  const auto res = find_map(built.objective, built.start);
  const auto total = built.objective.total();
  const auto pair = PrecisionPair::from_total(res.neg_hessian, built.objective.penalty_precision);
  const auto geom = make_local_geometry(res.x_star, pair);
  const auto rep = estimate_omega(total, geom, 64, 16, 2);
  Objective h;
  h.dim = 1;
  const Objective& lik = built.objective.likelihood;
  const double n = built.sample_size;
  h.value_fn = [&lik, n](const Vec& x) { return -evaluate(lik, x) / n; };
  const auto sc = estimate_self_concordance(h, geom, n, 32, 16, 2, true);

  CertificateOptions opts;
  opts.omega_inflation = 1.25;
  const auto cert = build_certificate(built.objective, res, sc, rep, opts);
  CHECK(cert.omega == doctest::Approx(1.25 * cert.omega_raw).epsilon(1e-12));
  CHECK(cert.omega_raw == doctest::Approx(rep.omega).epsilon(1e-12));
  CHECK(cert.gates.count("omega_pg") == 1);
  for (const auto& [name, gate] : cert.gates) {
    CAPTURE(name);
    if (gate.pass) CHECK(gate.lhs <= gate.rhs + 1e-15);
  }
  // every probability-valued bound lies in a sane range before clamping
  CHECK(cert.tail_rho >= 0.0);
  CHECK(cert.tail_rho_g <= cert.tail_rho);
  CHECK(cert.concentration == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
}
