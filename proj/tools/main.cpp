#include "laplace_kit/common.hpp"
#include "laplace_kit/geometry.hpp"
#include "laplace_kit/inverse.hpp"
#include "laplace_kit/iterations.hpp"
#include "laplace_kit/json_io.hpp"
#include "laplace_kit/models.hpp"
#include "laplace_kit/objective.hpp"
#include "laplace_kit/qmc.hpp"
#include "laplace_kit/remainders.hpp"
#include "laplace_kit/rng.hpp"
#include "laplace_kit/solver.hpp"
#include "laplace_kit/verifier.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace lk = laplace_kit;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitGateFail = 2;

struct CommonOptions {
  std::string model_id;
  std::map<std::string, double> model_params;
  std::vector<std::string> model_param_kv;  // raw key=value pairs from the CLI
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  double deviation_x = 4.0;
  double nu = 2.0 / 3.0;
  int threads = 0;  // 0 = env / default
  int n_dirs = 64;
  int n_line = 32;
  int samples = 2048;       // M
  int grid_resolution = 0;  // 0 = per-dimension default
  double big_c = 1.0;
  double c_ell = 1.0;
};

void add_common_flags(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--model", o.model_id, "built-in model id");
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--model-param", o.model_param_kv, "model parameter as key=value (repeatable)");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--threads", o.threads, "worker thread cap (0 = LAPLACE_KIT_THREADS or 1)");
  cmd->add_option("--x", o.deviation_x, "deviation level x (tail mass e^-x)");
  cmd->add_option("--nu", o.nu, "local-set factor nu in (0,1)");
  cmd->add_option("--n-dirs", o.n_dirs, "directions for remainder sampling");
  cmd->add_option("--n-line", o.n_line, "line points per direction");
  cmd->add_option("--M", o.samples, "Monte-Carlo budget per step / verification");
  cmd->add_option("--grid-resolution", o.grid_resolution, "grid nodes per axis (0 = auto)");
}

// strict config: every key must be recognized
void apply_config(CommonOptions& o, const std::set<std::string>& extra_allowed,
                  json* extra_out) {
  for (const std::string& kv : o.model_param_kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw lk::ConfigError("--model-param expects key=value, got '" + kv + "'");
    }
    try {
      o.model_params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw lk::ConfigError("--model-param value must be numeric in '" + kv + "'");
    }
  }
  if (o.config_path.empty()) return;
  std::ifstream in(o.config_path);
  if (!in) throw lk::ConfigError("cannot read config file: " + o.config_path);
  json cfg = json::parse(in, nullptr, true, true);
  if (!cfg.is_object()) throw lk::ConfigError("config root must be a JSON object");

  const std::set<std::string> known = {"model",    "model_params", "seed",   "x",
                                       "nu",       "threads",      "n_dirs", "n_line",
                                       "M",        "grid_resolution", "out", "big_c",
                                       "c_ell"};
  for (const auto& [key, value] : cfg.items()) {
    if (!known.count(key) && !extra_allowed.count(key)) {
      throw lk::ConfigError("config: unknown key '" + key + "'");
    }
  }
  if (cfg.contains("model")) o.model_id = cfg["model"].get<std::string>();
  if (cfg.contains("model_params")) {
    for (const auto& [k, v] : cfg["model_params"].items()) {
      if (!v.is_number()) throw lk::ConfigError("model_params values must be numbers");
      o.model_params[k] = v.get<double>();
    }
  }
  if (cfg.contains("seed")) o.seed = cfg["seed"].get<std::uint64_t>();
  if (cfg.contains("x")) o.deviation_x = cfg["x"].get<double>();
  if (cfg.contains("nu")) o.nu = cfg["nu"].get<double>();
  if (cfg.contains("threads")) o.threads = cfg["threads"].get<int>();
  if (cfg.contains("n_dirs")) o.n_dirs = cfg["n_dirs"].get<int>();
  if (cfg.contains("n_line")) o.n_line = cfg["n_line"].get<int>();
  if (cfg.contains("M")) o.samples = cfg["M"].get<int>();
  if (cfg.contains("grid_resolution")) o.grid_resolution = cfg["grid_resolution"].get<int>();
  if (cfg.contains("out")) o.out_dir = cfg["out"].get<std::string>();
  if (cfg.contains("big_c")) o.big_c = cfg["big_c"].get<double>();
  if (cfg.contains("c_ell")) o.c_ell = cfg["c_ell"].get<double>();
  if (extra_out) {
    for (const auto& key : extra_allowed) {
      if (cfg.contains(key)) (*extra_out)[key] = cfg[key];
    }
  }
}

void setup_threads(const CommonOptions& o) { lk::set_thread_count(o.threads); }

// h = -l / n, the normalized negative log-likelihood used for the
// self-concordance ratios
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

struct CertifyResult {
  lk::BuiltModel model;
  lk::MapResult map;
  lk::LocalGeometry geom;
  lk::LaplaceCertificate cert;
};

CertifyResult run_certify_pipeline(const CommonOptions& o) {
  CertifyResult result;
  result.model = lk::build_model(o.model_id, o.model_params, o.seed);
  const lk::BuiltModel& model = result.model;

  result.map = lk::find_map(model.objective, model.start);
  result.geom = lk::make_local_geometry(
      result.map.x_star,
      lk::PrecisionPair::from_total(result.map.neg_hessian, model.objective.penalty_precision),
      o.deviation_x, o.nu);

  const lk::Objective f_total = model.objective.total();
  const lk::RemainderReport report =
      lk::estimate_omega(f_total, result.geom, o.n_dirs, o.n_line, o.seed);
  const lk::Objective h = scaled_negative(model.objective.likelihood, model.sample_size);
  const lk::SelfConcordance sc = lk::estimate_self_concordance(
      h, result.geom, model.sample_size, o.n_dirs, o.n_line, o.seed, true);

  lk::CertificateOptions copts;
  copts.deviation_x = o.deviation_x;
  copts.nu = o.nu;
  copts.big_c = o.big_c;
  copts.c_ell = o.c_ell;
  result.cert = lk::build_certificate(model.objective, result.map, sc, report, copts);
  result.cert.model_id = o.model_id;
  result.cert.seed = o.seed;
  return result;
}

int default_resolution(int dim) {
  switch (dim) {
    case 1: return 801;
    case 2: return 161;
    case 3: return 41;
    default: return 0;  // grid not practical; importance sampling only
  }
}

struct EmpiricalRun {
  lk::EmpiricalQuantities emp;
  json detail = json::object();
};

EmpiricalRun measure_empirical(const CertifyResult& c, const CommonOptions& o) {
  EmpiricalRun run;
  const lk::Objective f_total = c.model.objective.total();
  const int dim = f_total.dim;
  const int res = o.grid_resolution > 0 ? o.grid_resolution : default_resolution(dim);

  if (res > 0 && dim <= 5) {
    const lk::GridPosterior gp = lk::grid_posterior(f_total, c.geom.center, c.geom.pair, 10.0, res);
    const lk::GridTv tv = lk::tv_grid(gp, c.geom.center, c.geom.pair.dg2);
    run.emp.tv = tv.tv;
    run.emp.tv_err = tv.quaderr;
    const lk::GridKl kl = lk::kl_grid(gp, c.geom.center, c.geom.pair.dg2);
    if (!kl.infinite) {
      run.emp.kl = kl.kl;
      run.emp.kl_err = 0.0;
    }
    run.emp.tail_mass =
        lk::tail_mass_grid(gp, c.geom.center, c.geom.pair.d_sqrt, c.geom.r_g);
    run.emp.tail_err = tv.quaderr;
    const lk::Vec mean = lk::mean_grid(gp);
    run.emp.mean_shift_d_norm = (c.geom.pair.d_sqrt * (mean - c.geom.center)).norm();
    run.emp.mean_shift_err = tv.quaderr;
    run.detail["method"] = "grid";
    run.detail["resolution"] = res;
  }

  // importance-sampling functionals: ball-class discrepancy (and everything
  // else when the grid is not available)
  const lk::IsFunctionals is =
      lk::posterior_functionals_is(f_total, c.geom, 1.3, o.samples * 8, o.seed);
  double sup_disc = 0.0, sup_err = 0.0;
  for (std::size_t i = 0; i < is.radii.size(); ++i) {
    const double d = std::abs(is.ball_prob[i] - is.ball_prob_gauss[i]);
    if (d > sup_disc) {
      sup_disc = d;
      sup_err = is.ball_prob_stderr[i];
    }
  }
  run.emp.ball_class_discrepancy = sup_disc;
  run.emp.ball_class_err = sup_err;
  if (!run.emp.tv) {
    // no grid: fall back to sampled functionals where possible
    run.emp.tail_mass = is.tail_mass_u;
    run.emp.tail_err = is.tail_stderr;
    run.emp.mean_shift_d_norm = (c.geom.pair.d_sqrt * (is.mean - c.geom.center)).norm();
    run.emp.mean_shift_err = (c.geom.pair.d_sqrt * is.mean_stderr).norm();
    run.detail["method"] = "importance-sampling";
  }
  run.detail["is_ess"] = is.ess;
  return run;
}

int cmd_certify(const CommonOptions& o) {
  const CertifyResult c = run_certify_pipeline(o);
  lk::write_json_file(o.out_dir + "/certificate.json", lk::to_json(c.cert));
  std::cout << "certificate written to " << o.out_dir << "/certificate.json"
            << (c.cert.all_gates_pass() ? "" : " (some gates FAIL)") << "\n";
  return c.cert.all_gates_pass() ? kExitOk : kExitGateFail;
}

int cmd_verify(const CommonOptions& o, const std::vector<int>& scan_n) {
  if (!scan_n.empty()) {
    std::string csv = "n,tv_empirical,tv_bound_sc,tv_bound_all_sets,holds\n";
    bool all_hold = true;
    for (int n : scan_n) {
      CommonOptions on = o;
      on.model_params["n"] = n;
      const CertifyResult c = run_certify_pipeline(on);
      const EmpiricalRun run = measure_empirical(c, on);
      const double bound_sc = c.cert.tv_bound_sc ? std::min(1.0, *c.cert.tv_bound_sc) : 1.0;
      const double tv = run.emp.tv.value_or(std::nan(""));
      const bool holds = !std::isnan(tv) && tv <= bound_sc + 4.0 * run.emp.tv_err.value_or(0.0);
      all_hold = all_hold && holds;
      csv += std::to_string(n) + "," + std::to_string(tv) + "," + std::to_string(bound_sc) + "," +
             std::to_string(std::min(1.0, c.cert.tv_bound_all_sets)) + "," +
             (holds ? "1" : "0") + "\n";
    }
    lk::write_text_file(o.out_dir + "/scaling.csv", csv);
    std::cout << "scaling study written to " << o.out_dir << "/scaling.csv\n";
    return all_hold ? kExitOk : kExitGateFail;
  }

  const CertifyResult c = run_certify_pipeline(o);
  const EmpiricalRun run = measure_empirical(c, o);
  const lk::SoundnessReport report = lk::soundness_report(c.cert, run.emp);

  lk::write_json_file(o.out_dir + "/certificate.json", lk::to_json(c.cert));
  json rj = lk::to_json(report);
  rj["detail"] = run.detail;
  lk::write_json_file(o.out_dir + "/soundness.json", rj);
  lk::write_text_file(o.out_dir + "/soundness.csv", lk::soundness_csv(report));
  std::cout << "soundness: " << (report.all_hold ? "all gated rows hold" : "VIOLATION") << " ("
            << report.rows.size() << " rows, " << report.missing.size() << " missing)\n";
  return report.all_hold ? kExitOk : kExitGateFail;
}

int cmd_invert(const CommonOptions& o, const std::string& family, int p, int n, double sigma) {
  CommonOptions oi = o;
  oi.model_id = family + "-inverse";
  lk::SyntheticProblem problem = lk::make_synthetic(family, p, n, sigma, oi.seed);
  lk::InverseProblemSpec& spec = problem.spec;
  spec.deviation_x = o.deviation_x;
  lk::BuiltModel model;
  model.objective = lk::penalized_objective(spec);
  model.start = spec.prior_mean;

  const double r0 = lk::x0_radius(spec);
  lk::RegularityConstants consts =
      lk::estimate_constants(spec, r0, 128, std::max(o.n_dirs, 32), oi.seed);
  const lk::ConditionReport conditions = lk::check_conditions(spec, consts);
  const lk::ConcavityReport concavity = lk::concavity_margin_check(spec, consts, 256, oi.seed);

  const lk::MapResult map = lk::find_map(model.objective, model.start);
  lk::CertificateOptions copts;
  copts.deviation_x = o.deviation_x;
  copts.nu = o.nu;
  copts.big_c = o.big_c;
  copts.c_ell = o.c_ell;
  lk::LaplaceCertificate cert = lk::nl_certificate(spec, consts, map, copts);
  cert.model_id = oi.model_id;
  cert.seed = oi.seed;

  lk::write_json_file(o.out_dir + "/constants.json", lk::to_json(consts));
  json cj = lk::to_json(conditions);
  cj["concavity"] = {{"min_gen_eig", concavity.min_gen_eig},
                     {"threshold", concavity.threshold},
                     {"samples", concavity.samples},
                     {"pass", concavity.pass}};
  lk::write_json_file(o.out_dir + "/conditions.json", cj);
  lk::write_json_file(o.out_dir + "/certificate.json", lk::to_json(cert));

  const bool ok = conditions.all_pass && concavity.pass && cert.all_gates_pass();
  std::cout << "inverse problem " << oi.model_id << ": conditions "
            << (conditions.all_pass ? "pass" : "FAIL") << ", concavity margin "
            << (concavity.pass ? "pass" : "FAIL") << ", certificate gates "
            << (cert.all_gates_pass() ? "pass" : "FAIL") << "\n";
  return ok ? kExitOk : kExitGateFail;
}

int cmd_optimize(const CommonOptions& o, double a, int steps, bool no_qmc) {
  const lk::BuiltModel model = lk::build_model(o.model_id, o.model_params, o.seed);
  const int p = model.objective.likelihood.dim;

  lk::IterationConfig cfg;
  cfg.x0 = model.start;
  cfg.g0_squared =
      model.iteration_g0_squared ? *model.iteration_g0_squared : lk::Mat::Identity(p, p);
  cfg.precision_factor = a;
  cfg.samples_per_step = o.samples;
  cfg.max_steps = steps;
  cfg.seed = o.seed;
  cfg.use_qmc = !no_qmc;

  const lk::Objective f_total = model.objective.total();
  const lk::IterationTrace trace = lk::run(f_total, cfg);

  const lk::MapResult map = lk::find_map(model.objective, model.start);
  const lk::Mat dg_sqrt = lk::spd_sqrt(map.neg_hessian);
  const lk::Vec final_x = trace.steps.empty() ? cfg.x0 : trace.steps.back().x;
  const double dist = (dg_sqrt * (final_x - map.x_star)).norm();

  json summary = lk::to_json(trace);
  summary["map_x"] = json::array();
  for (int j = 0; j < p; ++j) summary["map_x"].push_back(map.x_star[j]);
  summary["final_distance_dg_norm"] = dist;
  summary["qmc"] = !no_qmc;
  lk::write_json_file(o.out_dir + "/trace.json", summary);
  lk::write_text_file(o.out_dir + "/trace.csv", lk::trace_csv(trace));
  std::cout << "optimizer finished after " << trace.steps.size() << " steps; |D_G (x - x*)| = "
            << dist << "\n";
  return kExitOk;
}

int cmd_qf_check(const CommonOptions& o, long long trials) {
  json out;
  out["trials"] = trials;
  bool all_hold = true;
  lk::CounterRng rng = lk::CounterRng::stream(o.seed, "qf-check.setup", 0);

  // (a) tail bound for the ball radius sqrt(tr B) + sqrt(2 x ||B||)
  json tails = json::array();
  for (int cfg_i = 0; cfg_i < 20; ++cfg_i) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 6);
    lk::Mat t(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) t(i, j) = rng.normal();
    const lk::Mat b = t * t.transpose() / d;
    const double x = (cfg_i % 3 == 0) ? 1.0 : (cfg_i % 3 == 1 ? 2.0 : 4.0);
    const double radius = lk::gaussian_ball_radius(b, x);

    long long exceed = 0;
    const std::int64_t n_chunks =
        (trials + lk::CounterRng::kChunk - 1) / lk::CounterRng::kChunk;
    std::vector<long long> ex(n_chunks, 0);
    lk::parallel_chunks(n_chunks, [&](std::int64_t c) {
      lk::CounterRng r = lk::CounterRng::stream(o.seed + cfg_i, "qf-check.tail",
                                                static_cast<std::uint64_t>(c));
      const std::int64_t lo = c * lk::CounterRng::kChunk;
      const std::int64_t hi = std::min<std::int64_t>(lo + lk::CounterRng::kChunk, trials);
      for (std::int64_t i = lo; i < hi; ++i) {
        lk::Vec g(d);
        for (int j = 0; j < d; ++j) g[j] = r.normal();
        if ((t * g).squaredNorm() / d > radius * radius) ++ex[c];
      }
    });
    for (auto e : ex) exceed += e;
    const double freq = static_cast<double>(exceed) / static_cast<double>(trials);
    const double se = std::sqrt(freq * (1.0 - freq) / static_cast<double>(trials));
    const bool holds = freq <= std::exp(-x) + 4.0 * se;
    all_hold = all_hold && holds;
    tails.push_back({{"dim", d}, {"x", x}, {"radius", radius}, {"frequency", freq},
                     {"stderr", se}, {"bound", std::exp(-x)}, {"holds", holds}});
  }
  out["tail_checks"] = tails;

  // (b) even-moment identities, orders 4 and 6
  json moments = json::array();
  for (int cfg_i = 0; cfg_i < 4; ++cfg_i) {
    const int d = 2 + static_cast<int>(rng.next_u64() % 4);
    lk::Mat t(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) t(i, j) = rng.normal();
    const lk::Mat b = t * t.transpose() / d;
    for (int order : {4, 6}) {
      const double exact = lk::gaussian_norm_even_moment(b, order);
      const std::int64_t n = std::min<long long>(trials, 200000);
      const std::int64_t n_chunks = (n + lk::CounterRng::kChunk - 1) / lk::CounterRng::kChunk;
      std::vector<double> sums(n_chunks, 0.0), sqs(n_chunks, 0.0);
      lk::parallel_chunks(n_chunks, [&](std::int64_t c) {
        lk::CounterRng r = lk::CounterRng::stream(o.seed + 100 + cfg_i, "qf-check.moment",
                                                  static_cast<std::uint64_t>(c) + 1000ULL * order);
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
      const double mean = lk::pairwise_sum(sums) / static_cast<double>(n);
      const double var =
          std::max(0.0, lk::pairwise_sum(sqs) / static_cast<double>(n) - mean * mean);
      const double se = std::sqrt(var / static_cast<double>(n));
      const bool holds = std::abs(mean - exact) <= 4.0 * se;
      all_hold = all_hold && holds;
      moments.push_back({{"dim", d}, {"order", order}, {"exact", exact}, {"mc", mean},
                         {"stderr", se}, {"holds", holds}});
    }
  }
  out["moment_checks"] = moments;

  // (c) determinant contiguity bounds on random (B, omega) pairs
  json dets = json::array();
  bool det_ok = true;
  for (int cfg_i = 0; cfg_i < 50; ++cfg_i) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 6);
    lk::Mat t(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) t(i, j) = rng.normal();
    lk::Mat d2 = t * t.transpose();
    lk::Mat g2 = lk::Mat::Identity(d, d);
    const auto pair = lk::PrecisionPair::from_curvatures(d2, g2);
    const double omega = (1.0 / 3.0) * (0.02 + 0.98 * rng.uniform());
    const auto bounds = lk::det_contiguity_bounds(omega, pair);
    const bool holds = bounds.plus_exact <= bounds.plus_bound * (1.0 + 1e-12) &&
                       bounds.minus_invsqrt_exact <= bounds.minus_invsqrt_bound * (1.0 + 1e-12);
    det_ok = det_ok && holds;
    dets.push_back({{"dim", d}, {"omega", omega}, {"plus_exact", bounds.plus_exact},
                    {"plus_bound", bounds.plus_bound},
                    {"minus_invsqrt_exact", bounds.minus_invsqrt_exact},
                    {"minus_invsqrt_bound", bounds.minus_invsqrt_bound}, {"holds", holds}});
  }
  all_hold = all_hold && det_ok;
  out["det_checks"] = dets;
  out["all_hold"] = all_hold;

  lk::write_json_file(o.out_dir + "/qf_check.json", out);
  std::cout << "qf-check: " << (all_hold ? "all bounds hold" : "VIOLATION") << "\n";
  return all_hold ? kExitOk : kExitGateFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laplace-approximation certificates: compute, verify, invert, optimize"};
  app.require_subcommand(1);

  CommonOptions oc, ov, oi, oo, oq;

  CLI::App* certify = app.add_subcommand("certify", "compute a certificate for a model");
  add_common_flags(certify, oc);

  CLI::App* verify = app.add_subcommand("verify", "certify and check the bounds empirically");
  add_common_flags(verify, ov);
  std::vector<int> scan_n;
  verify->add_option("--n", scan_n, "scaling study: comma-separated sample sizes")
      ->delimiter(',');

  CLI::App* invert = app.add_subcommand("invert", "nonlinear inverse-problem pipeline");
  add_common_flags(invert, oi);
  std::string family = "exp";
  int inv_p = 2, inv_n = 50;
  double inv_sigma = 0.0;
  invert->add_option("--family", family, "forward-map family: exp | sigmoid | linear");
  invert->add_option("--p", inv_p, "parameter dimension");
  invert->add_option("--n", inv_n, "number of observations");
  invert->add_option("--sigma", inv_sigma, "observation noise level");

  CLI::App* optimize = app.add_subcommand("optimize", "gradient-free Laplace iterations");
  add_common_flags(optimize, oo);
  double opt_a = 1.5;
  int opt_steps = 40;
  bool no_qmc = false;
  optimize->add_option("--a", opt_a, "precision multiplier a > 1");
  optimize->add_option("--steps", opt_steps, "maximum iterations");
  optimize->add_flag("--no-qmc", no_qmc, "plain Monte-Carlo instead of Sobol sampling");

  CLI::App* qf = app.add_subcommand("qf-check", "Gaussian quadratic-form falsification suite");
  add_common_flags(qf, oq);
  long long trials = 1000000;
  qf->add_option("--trials", trials, "Monte-Carlo trials per configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (certify->parsed()) {
      apply_config(oc, {}, nullptr);
      if (oc.model_id.empty()) throw lk::ConfigError("certify: --model (or config) is required");
      setup_threads(oc);
      return cmd_certify(oc);
    }
    if (verify->parsed()) {
      json extra;
      apply_config(ov, {"scan_n"}, &extra);
      if (extra.contains("scan_n") && scan_n.empty())
        scan_n = extra["scan_n"].get<std::vector<int>>();
      if (ov.model_id.empty()) throw lk::ConfigError("verify: --model (or config) is required");
      setup_threads(ov);
      return cmd_verify(ov, scan_n);
    }
    if (invert->parsed()) {
      apply_config(oi, {}, nullptr);
      setup_threads(oi);
      if (family != "exp" && family != "sigmoid" && family != "linear")
        throw lk::ConfigError("invert: unknown family '" + family + "'");
      return cmd_invert(oi, family, inv_p, inv_n, inv_sigma);
    }
    if (optimize->parsed()) {
      apply_config(oo, {}, nullptr);
      if (oo.model_id.empty()) throw lk::ConfigError("optimize: --model (or config) is required");
      setup_threads(oo);
      return cmd_optimize(oo, opt_a, opt_steps, no_qmc);
    }
    if (qf->parsed()) {
      apply_config(oq, {}, nullptr);
      setup_threads(oq);
      return cmd_qf_check(oq, trials);
    }
  } catch (const lk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
