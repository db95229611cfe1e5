#include "laplace_kit/models.hpp"
#include "laplace_kit/verifier.hpp"

#include <doctest.h>

#include <cmath>

using namespace laplace_kit;

namespace {

Objective shifted_gaussian_1d(double mean) {
  Objective f;
  f.dim = 1;
  f.value_fn = [mean](const Vec& x) { return -0.5 * (x[0] - mean) * (x[0] - mean); };
  return f;
}

PrecisionPair unit_pair(int p) {
  return PrecisionPair::from_curvatures(Mat::Identity(p, p), Mat::Zero(p, p));
}

}  // namespace

TEST_CASE("tv_grid: N(0,1) vs N(0.5,1) gives the classic 0.19741") {
  const auto gp = grid_posterior(shifted_gaussian_1d(0.5), Vec::Constant(1, 0.5), unit_pair(1),
                                 10.0, 1601);
  const auto tv = tv_grid(gp, Vec::Zero(1), Mat::Identity(1, 1));
  // 2 Phi(1/4) - 1 = 0.1974126...
  CHECK(tv.tv == doctest::Approx(0.19741265).epsilon(1e-4));
  CHECK(tv.quaderr <= 1e-3);
  // self-comparison is exactly zero up to quadrature
  const auto self_tv = tv_grid(gp, Vec::Constant(1, 0.5), Mat::Identity(1, 1));
  CHECK(self_tv.tv <= 1e-8);
}

TEST_CASE("kl_grid: N(0,1) vs N(1,1) gives 1/2 both ways") {
  const auto gp = grid_posterior(shifted_gaussian_1d(0.0), Vec::Zero(1), unit_pair(1), 10.0, 1601);
  const auto kl = kl_grid(gp, Vec::Ones(1), Mat::Identity(1, 1));
  CHECK(!kl.infinite);
  CHECK(kl.kl == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(kl.reverse == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("tail_mass_grid: standard Gaussian interval masses") {
  const auto gp = grid_posterior(shifted_gaussian_1d(0.0), Vec::Zero(1), unit_pair(1), 10.0, 1601);
  // P(|X| > 1.959964) = 0.05
  CHECK(tail_mass_grid(gp, Vec::Zero(1), Mat::Identity(1, 1), 1.959963985) ==
        doctest::Approx(0.05).epsilon(1e-3));
  CHECK(tail_mass_grid(gp, Vec::Zero(1), Mat::Identity(1, 1), 6.0) <= 1e-8);
}

TEST_CASE("mean_grid: recovers the mean of a skewed density") {
  // f(x) = -x^2/2 - 0.1 x^3/6 has a posterior mean below 0 (left skew);
  // compare against a dense quadrature oracle computed here independently
  Objective f;
  f.dim = 1;
  f.value_fn = [](const Vec& x) {
    return -0.5 * x[0] * x[0] - 0.1 * x[0] * x[0] * x[0] / 6.0;
  };
  const auto gp = grid_posterior(f, Vec::Zero(1), unit_pair(1), 8.0, 3201);
  const Vec m = mean_grid(gp);

  double num = 0.0, den = 0.0;
  const int n = 200001;
  for (int i = 0; i < n; ++i) {
    const double x = -8.0 + 16.0 * i / (n - 1);
    const double w = std::exp(-0.5 * x * x - 0.1 * x * x * x / 6.0);
    num += w * x;
    den += w;
  }
  CHECK(m[0] == doctest::Approx(num / den).epsilon(1e-4));
  CHECK(m[0] < 0.0);
}

TEST_CASE("grid_posterior: normalization and 2-D marginal sanity") {
  Objective f;
  f.dim = 2;
  f.value_fn = [](const Vec& x) { return -0.5 * x.squaredNorm(); };
  const auto gp = grid_posterior(f, Vec::Zero(2), unit_pair(2), 8.0, 161);
  double mass = 0.0;
  for (std::int64_t i = 0; i < gp.size(); ++i) {
    mass += std::exp(gp.log_density_grid[i]) * gp.quad_weight(i) * gp.cell_volume;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  const auto tv = tv_grid(gp, Vec::Zero(2), Mat::Identity(2, 2));
  CHECK(tv.tv <= 1e-6);
}

TEST_CASE("posterior_functionals_is: exact Gaussian case matches closed forms") {
  Objective f;
  f.dim = 2;
  f.value_fn = [](const Vec& x) { return -0.5 * x.squaredNorm(); };
  const auto pair = unit_pair(2);
  const auto geom = make_local_geometry(Vec::Zero(2), pair, 4.0, 2.0 / 3.0);
  const auto is = posterior_functionals_is(f, geom, 1.3, 200000, 5);
  CHECK(is.ess >= 0.25 * 200000);
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(is.mean[j]) <= 5.0 * is.mean_stderr[j] + 1e-12);
  }
  // the ball-class probabilities agree with their Gaussian counterparts
  REQUIRE(is.radii.size() == is.ball_prob.size());
  REQUIRE(is.radii.size() == is.ball_prob_gauss.size());
  for (size_t k = 0; k < is.radii.size(); ++k) {
    CHECK(std::abs(is.ball_prob[k] - is.ball_prob_gauss[k]) <=
          5.0 * is.ball_prob_stderr[k] + 1e-4);
  }
  // tail mass beyond the local set is tiny and below e^{-x}
  CHECK(is.tail_mass_u <= std::exp(-4.0) + 5.0 * is.tail_stderr);
}

TEST_CASE("posterior_functionals_is: deterministic in the seed and worker count") {
  Objective f;
  f.dim = 1;
  f.value_fn = [](const Vec& x) { return -0.5 * x[0] * x[0] - 0.05 * std::pow(x[0], 3) / 6.0; };
  const auto geom = make_local_geometry(Vec::Zero(1), unit_pair(1), 4.0, 2.0 / 3.0);
  set_thread_count(1);
  const auto a = posterior_functionals_is(f, geom, 1.3, 20000, 9);
  set_thread_count(8);
  const auto b = posterior_functionals_is(f, geom, 1.3, 20000, 9);
  set_thread_count(0);
  CHECK(a.mean[0] == b.mean[0]);
  CHECK(a.tail_mass_u == b.tail_mass_u);
}

TEST_CASE("soundness_report: gating semantics and slack bookkeeping") {
  LaplaceCertificate cert;
  cert.p_g = 1.0;
  cert.x = 4.0;
  cert.r_g = concentration_radius(1.0, 4.0);
  cert.omega = 0.1;
  cert.n = 100.0;
  cert.c3 = 0.5;
  cert.diamond3 = 0.01;
  cert.tv_bound_all_sets = 0.2;
  cert.tv_bound_sc = 0.3;
  cert.kl_forward = 0.15;
  cert.mean_shift = 0.05;
  cert.concentration = std::exp(-4.0);
  cert.gates["omega_third"] = Gate{true, "omega <= 1/3", 0.1, 1.0 / 3.0};
  cert.gates["omega_pg"] = Gate{true, "omega*p_G <= 2/3", 0.1, 2.0 / 3.0};
  cert.gates["sc_radius"] = Gate{true, "c3*r_G/sqrt(n) <= 3/4", 0.2, 0.75};
  cert.gates["kl_forward"] = Gate{true, "<= 1", 0.15, 1.0};

  EmpiricalQuantities emp;
  emp.tv = 0.05;
  emp.tv_err = 0.001;
  emp.kl = 0.02;
  emp.kl_err = 0.001;
  emp.tail_mass = 0.001;
  emp.tail_err = 0.0001;
  emp.mean_shift_d_norm = 0.01;
  emp.mean_shift_err = 0.001;

  const auto rep = soundness_report(cert, emp);
  CHECK(rep.all_hold);
  CHECK(!rep.rows.empty());
  for (const auto& row : rep.rows) {
    CAPTURE(row.name);
    if (row.gate_valid) CHECK(row.empirical <= row.bound + 4.0 * row.error);
  }
  // a violated bound must be reported as such
  EmpiricalQuantities bad = emp;
  bad.tv = 0.9;
  const auto rep_bad = soundness_report(cert, bad);
  CHECK(!rep_bad.all_hold);

  // when a gate fails the row is excluded from the verdict
  LaplaceCertificate gated = cert;
  gated.gates["omega_pg"] = Gate{false, "omega*p_G <= 2/3", 1.0, 2.0 / 3.0};
  gated.gates["omega_third"] = Gate{false, "omega <= 1/3", 1.0, 1.0 / 3.0};
  gated.gates["sc_radius"] = Gate{false, "c3*r_G/sqrt(n) <= 3/4", 1.0, 0.75};
  gated.gates["kl_forward"] = Gate{false, "<= 1", 2.0, 1.0};
  const auto rep_gated = soundness_report(gated, bad);
  for (const auto& row : rep_gated.rows) {
    CHECK(!row.gate_valid);
  }
  CHECK(rep_gated.all_hold);  // vacuously: no gate-valid rows remain
}

TEST_CASE("soundness_report: missing empirical quantities are listed, not silently dropped") {
  LaplaceCertificate cert;
  cert.p_g = 1.0;
  cert.x = 4.0;
  cert.omega = 0.1;
  cert.n = 100.0;
  cert.c3 = 0.5;
  cert.tv_bound_all_sets = 0.2;
  cert.concentration = std::exp(-4.0);
  cert.gates["omega_pg"] = Gate{true, "", 0.1, 2.0 / 3.0};
  cert.gates["omega_third"] = Gate{true, "", 0.1, 1.0 / 3.0};
  EmpiricalQuantities emp;  // nothing measured
  const auto rep = soundness_report(cert, emp);
  CHECK(!rep.missing.empty());
}
