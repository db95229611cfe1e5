#include "laplace_kit/verifier.hpp"

#include "laplace_kit/rng.hpp"

#include <cmath>

namespace laplace_kit {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

Vec GridPosterior::point(std::int64_t flat) const {
  const int d = dim();
  Vec x(d);
  for (int j = d - 1; j >= 0; --j) {
    const int r = resolution[j];
    const int idx = static_cast<int>(flat % r);
    flat /= r;
    x[j] = box[j].first + (box[j].second - box[j].first) * idx / (r - 1);
  }
  return x;
}

double GridPosterior::quad_weight(std::int64_t flat) const {
  double w = 1.0;
  for (int j = dim() - 1; j >= 0; --j) {
    const int r = resolution[j];
    const int idx = static_cast<int>(flat % r);
    flat /= r;
    if (idx == 0 || idx == r - 1) w *= 0.5;
  }
  return w;
}

GridPosterior grid_posterior(const Objective& f, const Vec& center, const PrecisionPair& pair,
                             double box_sigmas, int resolution) {
  const int d = f.dim;
  if (resolution % 2 == 0) ++resolution;  // odd, so a stride-2 subgrid exists
  if (d > 5) throw PreconditionViolated("grid_posterior: dim <= 5");
  double total = 1.0;
  for (int j = 0; j < d; ++j) total *= resolution;
  if (total > 1e7) throw PreconditionViolated("grid_posterior: resolution^dim <= 1e7");

  GridPosterior gp;
  const Mat cov = pair.chol_dg2.solve(Mat::Identity(d, d));
  gp.box.resize(d);
  gp.resolution.assign(d, resolution);
  gp.cell_volume = 1.0;
  for (int j = 0; j < d; ++j) {
    const double sigma = std::sqrt(std::max(cov(j, j), 0.0));
    gp.box[j] = {center[j] - box_sigmas * sigma, center[j] + box_sigmas * sigma};
    gp.cell_volume *= (gp.box[j].second - gp.box[j].first) / (resolution - 1);
  }

  const auto n = static_cast<std::int64_t>(total);
  gp.log_density_grid.resize(n);
  const std::int64_t chunk = 4096;
  parallel_chunks((n + chunk - 1) / chunk, [&](std::int64_t c) {
    const std::int64_t lo = c * chunk, hi = std::min(n, lo + chunk);
    for (std::int64_t i = lo; i < hi; ++i) {
      gp.log_density_grid[i] = evaluate(f, gp.point(i));
    }
  });

  double mx = gp.log_density_grid[0];
  for (double v : gp.log_density_grid) mx = std::max(mx, v);
  std::vector<double> terms(n);
  std::vector<double> boundary(n, 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    const double w = gp.quad_weight(i);
    terms[i] = w * std::exp(gp.log_density_grid[i] - mx);
    if (w < 1.0) boundary[i] = terms[i];
  }
  const double z = pairwise_sum(terms) * gp.cell_volume;
  const double zb = pairwise_sum(boundary) * gp.cell_volume;
  if (zb > 1e-6 * z) throw BoxTooSmall("grid_posterior: boundary carries > 1e-6 relative mass");
  gp.log_normalizer = mx + std::log(z);
  for (auto& v : gp.log_density_grid) v -= gp.log_normalizer;
  return gp;
}

namespace {

double gaussian_log_density(const Vec& x, const Vec& mean, const Eigen::LLT<Mat>& llt,
                            double half_logdet) {
  const Vec d = x - mean;
  const Mat l = llt.matrixL();
  const Vec y = l.transpose() * d;  // ||L^t d||^2 = d^t prec d
  return half_logdet - 0.5 * x.size() * kLog2Pi - 0.5 * y.squaredNorm();
}

// shared walker over the grid and its stride-2 subgrid; the boundary of the
// subgrid coincides with the full-grid boundary because resolutions are odd
template <class F>
void for_subgrid(const GridPosterior& gp, int stride, const F& fn) {
  const int d = gp.dim();
  std::vector<int> idx(d, 0);
  for (;;) {
    std::int64_t flat = 0;
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      flat = flat * gp.resolution[j] + idx[j];
      if (idx[j] == 0 || idx[j] == gp.resolution[j] - 1) w *= 0.5;
    }
    fn(flat, w);
    int j = d - 1;
    for (; j >= 0; --j) {
      idx[j] += stride;
      if (idx[j] <= gp.resolution[j] - 1) break;
      idx[j] = 0;
    }
    if (j < 0) return;
  }
}

double tv_pass(const GridPosterior& gp, const Vec& mean, const Eigen::LLT<Mat>& llt,
               double half_logdet, int stride) {
  const double vol = gp.cell_volume * std::pow(static_cast<double>(stride), gp.dim());
  std::vector<double> diff;
  diff.reserve(gp.size());
  for_subgrid(gp, stride, [&](std::int64_t flat, double w) {
    const double p = std::exp(gp.log_density_grid[flat]);
    const double q = std::exp(gaussian_log_density(gp.point(flat), mean, llt, half_logdet));
    diff.push_back(w * std::abs(p - q));
  });
  return 0.5 * pairwise_sum(diff) * vol;
}

}  // namespace

GridTv tv_grid(const GridPosterior& gp, const Vec& mean, const Mat& precision) {
  const Eigen::LLT<Mat> llt = chol_spd(precision, "tv_grid precision");
  const Mat l = llt.matrixL();
  double half_logdet = 0.0;
  for (int i = 0; i < gp.dim(); ++i) half_logdet += std::log(l(i, i));
  GridTv out;
  out.tv = tv_pass(gp, mean, llt, half_logdet, 1);
  const double coarse = tv_pass(gp, mean, llt, half_logdet, 2);
  out.quaderr = std::abs(out.tv - coarse);
  return out;
}

GridKl kl_grid(const GridPosterior& gp, const Vec& mean, const Mat& precision) {
  const Eigen::LLT<Mat> llt = chol_spd(precision, "kl_grid precision");
  const Mat l = llt.matrixL();
  double half_logdet = 0.0;
  for (int i = 0; i < gp.dim(); ++i) half_logdet += std::log(l(i, i));

  GridKl out;
  const std::int64_t n = gp.size();
  std::vector<double> fwd(n), rev(n);
  const std::int64_t chunk = 4096;
  parallel_chunks((n + chunk - 1) / chunk, [&](std::int64_t c) {
    const std::int64_t lo = c * chunk, hi = std::min(n, lo + chunk);
    for (std::int64_t i = lo; i < hi; ++i) {
      const double lp = gp.log_density_grid[i];
      const double lq = gaussian_log_density(gp.point(i), mean, llt, half_logdet);
      const double w = gp.quad_weight(i);
      const double p = std::exp(lp);
      const double q = std::exp(lq);
      fwd[i] = p > 0 ? w * p * (lp - lq) : 0.0;
      rev[i] = q > 0 ? w * q * (lq - lp) : 0.0;
      if (p > 1e-300 && lq - lp < -700.0) out.infinite = true;
    }
  });
  out.kl = std::max(0.0, pairwise_sum(fwd) * gp.cell_volume);
  out.reverse = std::max(0.0, pairwise_sum(rev) * gp.cell_volume);
  return out;
}

double tail_mass_grid(const GridPosterior& gp, const Vec& center, const Mat& d_sqrt,
                      double radius) {
  const std::int64_t n = gp.size();
  std::vector<double> terms(n, 0.0);
  const std::int64_t chunk = 4096;
  parallel_chunks((n + chunk - 1) / chunk, [&](std::int64_t c) {
    const std::int64_t lo = c * chunk, hi = std::min(n, lo + chunk);
    for (std::int64_t i = lo; i < hi; ++i) {
      const Vec x = gp.point(i);
      if ((d_sqrt * (x - center)).norm() > radius) {
        terms[i] = gp.quad_weight(i) * std::exp(gp.log_density_grid[i]);
      }
    }
  });
  return pairwise_sum(terms) * gp.cell_volume;
}

Vec mean_grid(const GridPosterior& gp) {
  const std::int64_t n = gp.size();
  const int d = gp.dim();
  std::vector<Vec> terms(n, Vec::Zero(d));
  const std::int64_t chunk = 4096;
  parallel_chunks((n + chunk - 1) / chunk, [&](std::int64_t c) {
    const std::int64_t lo = c * chunk, hi = std::min(n, lo + chunk);
    for (std::int64_t i = lo; i < hi; ++i) {
      terms[i] = gp.quad_weight(i) * std::exp(gp.log_density_grid[i]) * gp.point(i);
    }
  });
  return pairwise_sum(terms) * gp.cell_volume;
}

IsFunctionals posterior_functionals_is(const Objective& f, const LocalGeometry& geom,
                                       double inflation, int m, std::uint64_t seed) {
  if (inflation < 1.0) throw PreconditionViolated("posterior_functionals_is: inflation >= 1");
  const int p = geom.pair.dim();

  for (int attempt = 0;; ++attempt) {
    // proposal N(x*, inflation^2 D_G^{-2})
    const Mat draws0 = sample_gaussian(geom.pair, m, CounterRng::mix64(seed + attempt));
    std::vector<double> logw(m);
    std::vector<double> dnorm(m);
    parallel_chunks(m, [&](std::int64_t i) {
      const Vec u = inflation * draws0.row(i).transpose();
      const Vec x = geom.center + u;
      // log proposal up to a constant: -||D_G u||^2 / (2 inflation^2)
      const Mat l = geom.pair.chol_dg2.matrixL();
      const double qn = (l.transpose() * u).squaredNorm();
      logw[i] = evaluate(f, x) + 0.5 * qn / (inflation * inflation);
      dnorm[i] = (geom.pair.d_sqrt * u).norm();
    });
    double mx = logw[0];
    for (double v : logw) mx = std::max(mx, v);
    std::vector<double> w(m), w2(m);
    for (int i = 0; i < m; ++i) {
      w[i] = std::exp(logw[i] - mx);
      w2[i] = w[i] * w[i];
    }
    const double sw = pairwise_sum(w);
    const double sw2 = pairwise_sum(w2);
    const double ess = sw * sw / sw2;
    if (ess < 50.0) {
      if (attempt < 2) {
        m *= 2;
        continue;
      }
      throw PreconditionViolated("posterior_functionals_is: degenerate weights, ess < 50");
    }

    IsFunctionals out;
    out.ess = ess;
    std::vector<Vec> wx(m);
    for (int i = 0; i < m; ++i) {
      wx[i] = w[i] * (geom.center + inflation * draws0.row(i).transpose());
    }
    out.mean = pairwise_sum(wx) / sw;
    out.mean_stderr = Vec::Zero(p);
    {
      std::vector<double> s(m);
      for (int j = 0; j < p; ++j) {
        for (int i = 0; i < m; ++i) {
          const double d = geom.center[j] + inflation * draws0(i, j) - out.mean[j];
          s[i] = w2[i] * d * d;
        }
        out.mean_stderr[j] = std::sqrt(pairwise_sum(s)) / sw;
      }
    }

    // tail of the local set and the ball-probability curve
    std::vector<double> tail_terms(m), tail_sq(m);
    for (int i = 0; i < m; ++i) {
      const double ind = dnorm[i] > geom.local_radius ? 1.0 : 0.0;
      tail_terms[i] = w[i] * ind;
      tail_sq[i] = w2[i] * ind;
    }
    out.tail_mass_u = pairwise_sum(tail_terms) / sw;
    {
      std::vector<double> s(m);
      for (int i = 0; i < m; ++i) {
        const double d = (dnorm[i] > geom.local_radius ? 1.0 : 0.0) - out.tail_mass_u;
        s[i] = w2[i] * d * d;
      }
      out.tail_stderr = std::sqrt(pairwise_sum(s)) / sw;
    }

    const int n_radii = 64;
    out.radii.resize(n_radii);
    out.ball_prob.resize(n_radii);
    out.ball_prob_stderr.resize(n_radii);
    out.ball_prob_gauss.resize(n_radii);
    const Mat gauss = sample_gaussian(geom.pair, m, CounterRng::mix64(seed ^ 0xabcdef12345ULL));
    std::vector<double> gnorm(m);
    parallel_chunks(m, [&](std::int64_t i) {
      gnorm[i] = (geom.pair.d_sqrt * gauss.row(i).transpose()).norm();
    });
    for (int r = 0; r < n_radii; ++r) {
      const double radius = geom.local_radius * 1.5 * (r + 1) / n_radii;
      out.radii[r] = radius;
      std::vector<double> bt(m), bs(m);
      int gcount = 0;
      for (int i = 0; i < m; ++i) {
        const double ind = dnorm[i] <= radius ? 1.0 : 0.0;
        bt[i] = w[i] * ind;
        if (gnorm[i] <= radius) ++gcount;
      }
      const double prob = pairwise_sum(bt) / sw;
      out.ball_prob[r] = prob;
      for (int i = 0; i < m; ++i) {
        const double d = (dnorm[i] <= radius ? 1.0 : 0.0) - prob;
        bs[i] = w2[i] * d * d;
      }
      out.ball_prob_stderr[r] = std::sqrt(pairwise_sum(bs)) / sw;
      out.ball_prob_gauss[r] = static_cast<double>(gcount) / m;
    }
    return out;
  }
}

SoundnessReport soundness_report(const LaplaceCertificate& cert,
                                 const EmpiricalQuantities& empirical) {
  SoundnessReport rep;
  auto row = [&](const std::string& name, const std::optional<double>& emp,
                 const std::optional<double>& err, double bound, bool gate_valid) {
    if (!emp) {
      rep.missing.push_back(name);
      return;
    }
    SoundnessRow r;
    r.name = name;
    r.empirical = *emp;
    r.error = err.value_or(0.0);
    r.bound = bound;
    r.gate_valid = gate_valid;
    r.holds = r.empirical <= r.bound + 4.0 * r.error;
    r.slack_ratio = r.bound / std::max(r.empirical, 1e-12);
    rep.rows.push_back(r);
    if (gate_valid && !r.holds) rep.all_hold = false;
  };

  const bool omega_gate = cert.gates.count("omega_pg") ? cert.gates.at("omega_pg").pass : true;
  const bool sc_gate = cert.gates.count("sc_radius") ? cert.gates.at("sc_radius").pass : true;
  const bool kl_gate = cert.gates.count("kl_forward") ? cert.gates.at("kl_forward").pass : true;

  row("tv_vs_all_sets_bound", empirical.tv, empirical.tv_err,
      std::min(1.0, cert.tv_bound_all_sets), omega_gate);
  if (cert.tv_bound_sc) {
    row("tv_vs_sc_bound", empirical.tv, empirical.tv_err, std::min(1.0, *cert.tv_bound_sc),
        sc_gate);
  }
  if (cert.tv_bound_symmetric_sets) {
    row("ball_class_vs_symmetric_bound", empirical.ball_class_discrepancy,
        empirical.ball_class_err, std::min(1.0, *cert.tv_bound_symmetric_sets),
        omega_gate && sc_gate);
  } else if (empirical.ball_class_discrepancy) {
    rep.missing.push_back("ball_class_vs_symmetric_bound");
  }
  if (cert.kl_forward) {
    row("kl_vs_forward_bound", empirical.kl, empirical.kl_err, *cert.kl_forward, kl_gate);
  }
  row("tail_vs_concentration", empirical.tail_mass, empirical.tail_err, cert.concentration,
      cert.gates.count("omega_third") ? cert.gates.at("omega_third").pass : true);
  if (cert.mean_shift) {
    row("mean_shift_vs_bound", empirical.mean_shift_d_norm, empirical.mean_shift_err,
        *cert.mean_shift, sc_gate);
  }
  return rep;
}

}  // namespace laplace_kit
