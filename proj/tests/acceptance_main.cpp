// Acceptance harness: one pass/fail line per criterion, exit 0 only when all
// criteria pass. Tolerances are pinned here, next to each check.

#include "laplace_kit/certificate.hpp"
#include "laplace_kit/geometry.hpp"
#include "laplace_kit/inverse.hpp"
#include "laplace_kit/iterations.hpp"
#include "laplace_kit/json_io.hpp"
#include "laplace_kit/models.hpp"
#include "laplace_kit/objective.hpp"
#include "laplace_kit/remainders.hpp"
#include "laplace_kit/rng.hpp"
#include "laplace_kit/solver.hpp"
#include "laplace_kit/verifier.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace lk = laplace_kit;

namespace {

struct Failure {
  std::string detail;
};

std::vector<std::string> g_notes;

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

// --- shared pipeline (mirrors the CLI's certify path) -------------------------

struct Pipeline {
  lk::BuiltModel model;
  lk::MapResult map;
  lk::LocalGeometry geom;
  lk::LaplaceCertificate cert;
};

lk::Objective scaled_negative(const lk::Objective& ell, double n) {
  lk::Objective h;
  h.dim = ell.dim;
  h.deriv_scale = ell.deriv_scale;
  h.value_fn = [ell, n](const lk::Vec& x) { return -lk::evaluate(ell, x) / n; };
  if (ell.gradient_fn) {
    h.gradient_fn = [ell, n](const lk::Vec& x) { return lk::Vec(-lk::gradient(ell, x) / n); };
  }
  if (ell.hessian_fn) {
    h.hessian_fn = [ell, n](const lk::Vec& x) { return lk::Mat(-lk::hessian(ell, x) / n); };
  }
  if (ell.dir_deriv_fn) {
    h.dir_deriv_fn = [ell, n](const lk::Vec& x, const lk::Vec& u, int order) {
      return -lk::directional_derivative(ell, x, u, order) / n;
    };
  }
  return h;
}

Pipeline certify(const std::string& id, const std::map<std::string, double>& params,
                 std::uint64_t seed, double x) {
  Pipeline pl;
  pl.model = lk::build_model(id, params, seed);
  pl.map = lk::find_map(pl.model.objective, pl.model.start);
  pl.geom = lk::make_local_geometry(
      pl.map.x_star,
      lk::PrecisionPair::from_total(pl.map.neg_hessian, pl.model.objective.penalty_precision), x);
  const lk::Objective f_total = pl.model.objective.total();
  const lk::RemainderReport rep = lk::estimate_omega(f_total, pl.geom, 64, 32, seed);
  const lk::Objective h = scaled_negative(pl.model.objective.likelihood, pl.model.sample_size);
  const lk::SelfConcordance sc =
      lk::estimate_self_concordance(h, pl.geom, pl.model.sample_size, 64, 32, seed, true);
  lk::CertificateOptions copts;
  copts.deviation_x = x;
  pl.cert = lk::build_certificate(pl.model.objective, pl.map, sc, rep, copts);
  pl.cert.model_id = id;
  pl.cert.seed = seed;
  return pl;
}

lk::EmpiricalQuantities measure(const Pipeline& pl, int resolution, int is_samples,
                                std::uint64_t seed) {
  lk::EmpiricalQuantities emp;
  const lk::Objective f_total = pl.model.objective.total();
  if (resolution > 0) {
    const lk::GridPosterior gp =
        lk::grid_posterior(f_total, pl.geom.center, pl.geom.pair, 10.0, resolution);
    const lk::GridTv tv = lk::tv_grid(gp, pl.geom.center, pl.geom.pair.dg2);
    emp.tv = tv.tv;
    emp.tv_err = tv.quaderr;
    const lk::GridKl kl = lk::kl_grid(gp, pl.geom.center, pl.geom.pair.dg2);
    if (!kl.infinite) {
      emp.kl = kl.kl;
      emp.kl_err = 0.0;
    }
    emp.tail_mass = lk::tail_mass_grid(gp, pl.geom.center, pl.geom.pair.d_sqrt, pl.geom.r_g);
    emp.tail_err = tv.quaderr;
    const lk::Vec mean = lk::mean_grid(gp);
    emp.mean_shift_d_norm = (pl.geom.pair.d_sqrt * (mean - pl.geom.center)).norm();
    emp.mean_shift_err = tv.quaderr;
  }
  if (is_samples > 0) {
    const lk::IsFunctionals is =
        lk::posterior_functionals_is(f_total, pl.geom, 1.3, is_samples, seed);
    double sup_disc = 0.0, sup_err = 0.0;
    for (std::size_t i = 0; i < is.radii.size(); ++i) {
      const double d = std::abs(is.ball_prob[i] - is.ball_prob_gauss[i]);
      if (d > sup_disc) {
        sup_disc = d;
        sup_err = is.ball_prob_stderr[i];
      }
    }
    emp.ball_class_discrepancy = sup_disc;
    emp.ball_class_err = sup_err;
  }
  return emp;
}

// --- criterion 1: exactness on the conjugate Gaussian-linear family -----------

void criterion_1() {
  for (int p : {1, 2, 5}) {
    const auto pl = certify("gaussian-linear", {{"p", double(p)}}, 1, 4.0);
    expect(pl.cert.omega <= 1e-9, "omega > 1e-9 at p=" + std::to_string(p));
    expect(*pl.cert.diamond2 <= 1e-9, "diamond2 > 1e-9 at p=" + std::to_string(p));
    expect(*pl.cert.diamond3 <= 1e-9, "diamond3 > 1e-9 at p=" + std::to_string(p));
    expect((pl.map.x_star - *pl.model.closed_form_map).norm() <= 1e-8,
           "MAP vs ridge closed form > 1e-8 at p=" + std::to_string(p));

    const int res = p == 1 ? 801 : (p == 2 ? 161 : 25);
    const double box = p == 5 ? 6.0 : 10.0;
    const lk::GridPosterior gp = lk::grid_posterior(pl.model.objective.total(), pl.geom.center,
                                                    pl.geom.pair, box, res);
    const lk::GridTv tv = lk::tv_grid(gp, pl.geom.center, pl.geom.pair.dg2);
    expect(tv.tv <= 1e-6,
           "grid TV " + std::to_string(tv.tv) + " > 1e-6 at p=" + std::to_string(p));
  }
}

// --- criterion 2: soundness battery -------------------------------------------

void criterion_2() {
  struct Case {
    std::string id;
    std::map<std::string, double> params;
    int resolution;
  };
  const std::vector<Case> cases = {
      {"logistic", {{"p", 1.0}, {"n", 50.0}}, 801},
      {"logistic", {{"p", 1.0}, {"n", 200.0}}, 801},
      {"logistic", {{"p", 2.0}, {"n", 200.0}}, 161},
      {"logistic", {{"p", 2.0}, {"n", 1000.0}}, 161},
      {"quartic-1d", {}, 801},
  };
  for (const auto& c : cases) {
    const auto pl = certify(c.id, c.params, 1, 8.0);
    const auto emp = measure(pl, c.resolution, 16384, 1);
    const auto report = lk::soundness_report(pl.cert, emp);
    std::string tag = c.id;
    for (const auto& [k, v] : c.params) tag += " " + k + "=" + std::to_string(int(v));
    expect(!report.rows.empty(), "no soundness rows for " + tag);
    for (const auto& row : report.rows) {
      if (!row.gate_valid) continue;
      expect(row.holds, tag + ": '" + row.name + "' empirical " +
                            std::to_string(row.empirical) + " > bound " +
                            std::to_string(row.bound) + " + 4*err");
    }
  }
}

// --- criterion 3: 1/sqrt(n) scaling on 1-D logistic ----------------------------

void criterion_3() {
  const std::vector<int> ns = {100, 1000, 10000};
  std::vector<double> log_n, log_tv;
  for (int n : ns) {
    const auto pl = certify("logistic", {{"p", 1.0}, {"n", double(n)}}, 1, 4.0);
    const lk::GridPosterior gp =
        lk::grid_posterior(pl.model.objective.total(), pl.geom.center, pl.geom.pair, 10.0, 801);
    const lk::GridTv tv = lk::tv_grid(gp, pl.geom.center, pl.geom.pair.dg2);
    expect(tv.tv > 0.0, "degenerate TV at n=" + std::to_string(n));
    const double bound =
        std::min({1.0, pl.cert.tv_bound_all_sets, pl.cert.tv_bound_sc.value_or(1.0)});
    expect(tv.tv <= bound + 4.0 * tv.quaderr,
           "TV " + std::to_string(tv.tv) + " above bound " + std::to_string(bound) +
               " at n=" + std::to_string(n));
    log_n.push_back(std::log(double(n)));
    log_tv.push_back(std::log(tv.tv));
  }
  // least-squares slope of log TV against log n
  double mx = 0, my = 0;
  for (size_t i = 0; i < log_n.size(); ++i) {
    mx += log_n[i];
    my += log_tv[i];
  }
  mx /= log_n.size();
  my /= log_tv.size();
  double num = 0, den = 0;
  for (size_t i = 0; i < log_n.size(); ++i) {
    num += (log_n[i] - mx) * (log_tv[i] - my);
    den += (log_n[i] - mx) * (log_n[i] - mx);
  }
  const double slope = num / den;
  g_notes.push_back("criterion-3 slope = " + std::to_string(slope));
  expect(slope <= -0.4, "decay slope " + std::to_string(slope) + " > -0.4");
}

// --- criterion 4: quadratic-form tails, moments, determinant bounds ------------

void criterion_4() {
  const long long trials = 1000000;
  lk::CounterRng rng = lk::CounterRng::stream(1, "acceptance.qf", 0);

  for (int cfg = 0; cfg < 20; ++cfg) {
    const int d = 1 + int(rng.next_u64() % 6);
    lk::Mat t(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) t(i, j) = rng.normal();
    const lk::Mat b = t * t.transpose() / d;
    const double x = (cfg % 3 == 0) ? 1.0 : (cfg % 3 == 1 ? 2.0 : 4.0);
    const double radius = lk::gaussian_ball_radius(b, x);

    const std::int64_t n_chunks = (trials + lk::CounterRng::kChunk - 1) / lk::CounterRng::kChunk;
    std::vector<long long> ex(n_chunks, 0);
    lk::parallel_chunks(n_chunks, [&](std::int64_t c) {
      lk::CounterRng r = lk::CounterRng::stream(1 + cfg, "acceptance.qf.tail", std::uint64_t(c));
      const std::int64_t lo = c * lk::CounterRng::kChunk;
      const std::int64_t hi = std::min<std::int64_t>(lo + lk::CounterRng::kChunk, trials);
      for (std::int64_t i = lo; i < hi; ++i) {
        lk::Vec g(d);
        for (int j = 0; j < d; ++j) g[j] = r.normal();
        if ((t * g).squaredNorm() / d > radius * radius) ++ex[c];
      }
    });
    long long exceed = 0;
    for (auto e : ex) exceed += e;
    const double freq = double(exceed) / double(trials);
    const double se = std::sqrt(freq * (1.0 - freq) / double(trials));
    expect(freq <= std::exp(-x) + 4.0 * se,
           "tail frequency " + std::to_string(freq) + " above exp(-x)+4se at cfg " +
               std::to_string(cfg));
  }

  for (int cfg = 0; cfg < 4; ++cfg) {
    const int d = 2 + int(rng.next_u64() % 4);
    lk::Mat t(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) t(i, j) = rng.normal();
    const lk::Mat b = t * t.transpose() / d;
    for (int order : {4, 6}) {
      const double exact = lk::gaussian_norm_even_moment(b, order);
      const std::int64_t n = 200000;
      const std::int64_t n_chunks = (n + lk::CounterRng::kChunk - 1) / lk::CounterRng::kChunk;
      std::vector<double> sums(n_chunks, 0.0), sqs(n_chunks, 0.0);
      lk::parallel_chunks(n_chunks, [&](std::int64_t c) {
        lk::CounterRng r = lk::CounterRng::stream(100 + cfg, "acceptance.qf.moment",
                                                  std::uint64_t(c) + 1000ULL * order);
        const std::int64_t lo = c * lk::CounterRng::kChunk;
        const std::int64_t hi = std::min<std::int64_t>(lo + lk::CounterRng::kChunk, n);
        for (std::int64_t i = lo; i < hi; ++i) {
          lk::Vec g(d);
          for (int j = 0; j < d; ++j) g[j] = r.normal();
          const double q = (t * g).squaredNorm() / d;
          const double v = order == 4 ? q * q : q * q * q;
          sums[c] += v;
          sqs[c] += v * v;
        }
      });
      const double mean = lk::pairwise_sum(sums) / double(n);
      const double var = std::max(0.0, lk::pairwise_sum(sqs) / double(n) - mean * mean);
      const double se = std::sqrt(var / double(n));
      expect(std::abs(mean - exact) <= 4.0 * se,
             "moment order " + std::to_string(order) + " off by more than 4 se");
    }
  }

  for (int cfg = 0; cfg < 50; ++cfg) {
    const int d = 1 + int(rng.next_u64() % 6);
    lk::Mat t(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) t(i, j) = rng.normal();
    const auto pair = lk::PrecisionPair::from_curvatures(t * t.transpose(),
                                                         lk::Mat::Identity(d, d));
    const double omega = (1.0 / 3.0) * (0.02 + 0.98 * rng.uniform());
    const auto bounds = lk::det_contiguity_bounds(omega, pair);
    expect(bounds.plus_exact <= bounds.plus_bound * (1.0 + 1e-12),
           "det(I + w B) bound violated at cfg " + std::to_string(cfg));
    expect(bounds.minus_invsqrt_exact <= bounds.minus_invsqrt_bound * (1.0 + 1e-12),
           "det(I - w B)^{-1/2} bound violated at cfg " + std::to_string(cfg));
  }
}

// --- criterion 5: univariate cubic perturbation --------------------------------

void criterion_5() {
  // f(x) = -x^2/2 - c x^3/6; geometry with deviation level x = 0.5 so the
  // local radius is (2 + 1) / (2/3) = 4.5 and omega = 1.5 c stays <= 0.3
  for (double c : {0.05, 0.1, 0.2}) {
    const double radius = 4.5;
    const double omega = c * radius / 3.0;
    expect(omega <= 1.0 / 3.0 + 1e-12, "omega above 1/3 at c=" + std::to_string(c));

    // |I / I_G - 1| over the local set by a dense trapezoid grid
    const int n = 400001;
    double i_f = 0.0, i_g = 0.0;
    for (int k = 0; k < n; ++k) {
      const double x = -radius + 2.0 * radius * k / (n - 1);
      const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
      i_f += w * std::exp(-0.5 * x * x - c * x * x * x / 6.0);
      i_g += w * std::exp(-0.5 * x * x);
    }
    const double err = std::abs(i_f / i_g - 1.0);

    const double dia3 = lk::diamond3_univariate(c, 1.0);  // 0.7 |c|
    const double dia4 = lk::diamond4_univariate(c, 0.0, omega, 1.0);
    g_notes.push_back("criterion-5 c=" + std::to_string(c) + " err=" + std::to_string(err) +
                      " dia3=" + std::to_string(dia3) + " dia4=" + std::to_string(dia4));
    expect(err <= dia3, "local error above 0.7|c| at c=" + std::to_string(c));
    expect(err <= dia4, "local error above the 4th-order term at c=" + std::to_string(c));
  }
}

// --- criterion 6: nonlinear inverse problem (exp family) -----------------------

void criterion_6() {
  auto prob = lk::make_synthetic("exp", 2, 50, 0.0, 1);
  lk::InverseProblemSpec& spec = prob.spec;

  const double r0 = lk::x0_radius(spec);
  lk::RegularityConstants consts = lk::estimate_constants(spec, r0, 128, 64, 1);
  for (double v : {consts.c2_hat, consts.cn_hat, consts.c0_hat, consts.cg_hat, consts.c3_hat,
                   *consts.c4_hat}) {
    expect(std::isfinite(v) && v >= 0.0, "non-finite regularity constant");
  }

  const auto conditions = lk::check_conditions(spec, consts);
  for (const auto& line : conditions.lines) {
    expect(line.pass, "condition '" + line.name + "' fails: " + std::to_string(line.lhs) +
                          " > " + std::to_string(line.rhs));
  }

  const auto conc = lk::concavity_margin_check(spec, consts, 256, 1);
  expect(conc.min_gen_eig >= 1.0 - consts.delta - 1e-8,
         "concavity margin " + std::to_string(conc.min_gen_eig) + " below 1 - delta");

  const auto map = lk::find_map(lk::penalized_objective(spec), spec.prior_mean);
  expect(map.converged, "inverse MAP did not converge");
  const auto cert = lk::nl_certificate(spec, consts, map);
  expect(cert.conditional_on_x0, "certificate not marked conditional");

  // conditional TV on X0 by grid quadrature, against the certified bound
  const lk::Objective f_total = lk::penalized_objective(spec).total();
  const auto pair = lk::PrecisionPair::from_curvatures(lk::fisher(spec, map.x_star),
                                                       spec.prior_precision);
  const lk::GridPosterior gp = lk::grid_posterior(f_total, map.x_star, pair, 10.0, 161);
  const lk::Mat q0 = lk::spd_sqrt(lk::breve_d2(spec, spec.prior_mean));
  const Eigen::LLT<lk::Mat> llt = lk::chol_spd(pair.dg2, "acceptance c6");
  const lk::Mat lmat = llt.matrixL();
  double half_logdet = 0.0;
  for (int i = 0; i < 2; ++i) half_logdet += std::log(lmat(i, i));
  const double log2pi = std::log(2.0 * M_PI);
  double p_in = 0.0, q_in = 0.0;
  std::vector<double> p_vals(gp.size()), q_vals(gp.size());
  std::vector<bool> inside(gp.size());
  for (std::int64_t i = 0; i < gp.size(); ++i) {
    const lk::Vec xpt = gp.point(i);
    inside[i] = (q0 * (xpt - spec.prior_mean)).norm() <= consts.r0;
    const double w = gp.quad_weight(i);
    p_vals[i] = w * std::exp(gp.log_density_grid[i]);
    const lk::Vec d = xpt - map.x_star;
    const double qd = (lmat.transpose() * d).squaredNorm();
    q_vals[i] = w * std::exp(half_logdet - log2pi - 0.5 * qd);
    if (inside[i]) {
      p_in += p_vals[i];
      q_in += q_vals[i];
    }
  }
  expect(p_in > 0 && q_in > 0, "degenerate conditional masses");
  double tv_cond = 0.0;
  for (std::int64_t i = 0; i < gp.size(); ++i) {
    if (inside[i]) tv_cond += std::abs(p_vals[i] / p_in - q_vals[i] / q_in);
  }
  tv_cond *= 0.5;
  const double bound = std::min(1.0, cert.tv_bound_all_sets);
  g_notes.push_back("criterion-6 conditional TV = " + std::to_string(tv_cond) +
                    ", bound = " + std::to_string(bound));
  expect(tv_cond <= bound, "conditional TV above the certified bound");

  // prior mass outside X0 <= e^{-x} + 4 se with 1e6 draws
  const auto prior_pair =
      lk::PrecisionPair::from_curvatures(spec.prior_precision, lk::Mat::Zero(2, 2));
  const int m = 1000000;
  const lk::Mat draws = lk::sample_gaussian(prior_pair, m, 99);
  long long outside = 0;
  for (int i = 0; i < m; ++i) {
    const lk::Vec xpt = spec.prior_mean + draws.row(i).transpose();
    if ((q0 * (xpt - spec.prior_mean)).norm() > consts.r0) ++outside;
  }
  const double freq = double(outside) / m;
  const double se = std::sqrt(std::max(freq, 1e-12) * (1.0 - freq) / m);
  expect(freq <= std::exp(-spec.deviation_x) + 4.0 * se,
         "prior mass outside X0 = " + std::to_string(freq) + " above e^{-x} + 4 se");
}

// --- criterion 7: gradient-free Laplace iterations ------------------------------

void criterion_7() {
  for (int p : {1, 3}) {
    const std::string id = p == 1 ? "quartic-1d" : "quartic";
    const auto model = lk::build_model(id, {}, 1);
    const lk::Objective f_total = model.objective.total();
    const auto map = lk::find_map(model.objective, model.start);
    expect(map.converged, "quartic MAP did not converge at p=" + std::to_string(p));

    lk::IterationConfig cfg;
    cfg.x0 = model.start;
    cfg.g0_squared = *model.iteration_g0_squared;
    cfg.precision_factor = 1.5;
    cfg.samples_per_step = 2048;
    cfg.max_steps = 40;
    cfg.seed = 1;
    const auto trace = lk::run(f_total, cfg);
    expect(!trace.steps.empty(), "empty trace at p=" + std::to_string(p));
    const lk::Vec final_x = trace.steps.back().x;
    const lk::Mat dg_sqrt = lk::spd_sqrt(map.neg_hessian);
    const double dist = (dg_sqrt * (final_x - map.x_star)).norm();
    g_notes.push_back("criterion-7 p=" + std::to_string(p) +
                      " |D_G (x - x*)| = " + std::to_string(dist));
    expect(dist <= 1e-2, "final iterate " + std::to_string(dist) +
                             " from the MAP in D_G norm at p=" + std::to_string(p));

    const auto rerun = lk::run(f_total, cfg);
    expect(rerun.steps.size() == trace.steps.size(),
           "trace length changed on rerun at p=" + std::to_string(p));
    for (size_t k = 0; k < trace.steps.size(); ++k) {
      expect((rerun.steps[k].x - trace.steps[k].x).norm() == 0.0,
             "rerun diverged at step " + std::to_string(k));
    }
  }

  // one step on an exactly quadratic objective vs the closed-form posterior mean
  lk::Mat d2(2, 2);
  d2 << 2.0, 0.4, 0.4, 1.2;
  lk::Vec xbar(2);
  xbar << 0.7, -0.3;
  lk::Objective quad;
  quad.dim = 2;
  quad.value_fn = [d2, xbar](const lk::Vec& x) {
    const lk::Vec d = x - xbar;
    return -0.5 * d.dot(d2 * d);
  };
  const lk::Mat gk2 = 2.5 * lk::Mat::Identity(2, 2);
  const lk::Vec x_k = lk::Vec::Zero(2);
  const auto [x1, st] = lk::step(quad, x_k, gk2, 2048, 5, std::nullopt);
  const lk::Vec oracle = (d2 + gk2).ldlt().solve(d2 * xbar + gk2 * x_k);
  const double se = std::sqrt(lk::Mat((d2 + gk2).inverse()).norm() / std::max(st.ess, 1.0));
  expect((x1 - oracle).norm() <= 5.0 * se,
         "quadratic one-step error " + std::to_string((x1 - oracle).norm()) + " above 5 se = " +
             std::to_string(5.0 * se));
}

// --- criterion 8: byte-identical artifacts across worker counts -----------------

void criterion_8() {
  auto render_certificate = [](int threads) {
    lk::set_thread_count(threads);
    const auto pl = certify("logistic", {{"p", 2.0}, {"n", 200.0}}, 7, 4.0);
    return lk::to_json(pl.cert).dump(2);
  };
  auto render_trace = [](int threads) {
    lk::set_thread_count(threads);
    const auto model = lk::build_model("quartic-1d", {}, 3);
    lk::IterationConfig cfg;
    cfg.x0 = model.start;
    cfg.g0_squared = *model.iteration_g0_squared;
    cfg.samples_per_step = 1024;
    cfg.max_steps = 15;
    cfg.seed = 3;
    return lk::to_json(lk::run(model.objective.total(), cfg)).dump(2);
  };
  const std::string cert1 = render_certificate(1);
  const std::string cert8 = render_certificate(8);
  expect(cert1 == cert8, "certificate JSON differs between 1 and 8 threads");
  const std::string trace1 = render_trace(1);
  const std::string trace8 = render_trace(8);
  expect(trace1 == trace8, "optimizer trace JSON differs between 1 and 8 threads");
  lk::set_thread_count(0);
}

struct Criterion {
  const char* name;
  std::function<void()> fn;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"criterion-1 conjugate-gaussian-exactness", criterion_1},
      {"criterion-2 soundness-battery", criterion_2},
      {"criterion-3 logistic-tv-scaling", criterion_3},
      {"criterion-4 quadratic-form-suite", criterion_4},
      {"criterion-5 univariate-cubic", criterion_5},
      {"criterion-6 nonlinear-inverse", criterion_6},
      {"criterion-7 laplace-iterations", criterion_7},
      {"criterion-8 thread-determinism", criterion_8},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      c.fn();
    } catch (const Failure& f) {
      ok = false;
      detail = f.detail;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", c.name, secs,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failed;
  }
  for (const auto& n : g_notes) std::printf("  note: %s\n", n.c_str());
  return failed == 0 ? 0 : 1;
}
