#include "laplace_kit/remainders.hpp"

#include "laplace_kit/rng.hpp"

#include <cmath>

namespace laplace_kit {

double bregman(const Objective& f, const Vec& x, const Vec& u) {
  require_dim(u, f.dim, "bregman: u");
  return evaluate(f, x + u) - evaluate(f, x) - gradient(f, x).dot(u);
}

double delta3(const Objective& f, const Vec& x, const Vec& u) {
  return bregman(f, x, u) - 0.5 * u.dot(hessian(f, x) * u);
}

double delta4(const Objective& f, const Vec& x, const Vec& u) {
  return delta3(f, x, u) - directional_derivative(f, x, u, 3) / 6.0;
}

namespace {

// directions uniform on the ||D .||-unit sphere: standard normal mapped
// through D^{-1}, normalized so ||D u|| = 1
std::vector<Vec> d_sphere_directions(const LocalGeometry& geom, int n_dirs, std::uint64_t seed,
                                     const char* tag) {
  const int p = geom.pair.dim();
  Eigen::SelfAdjointEigenSolver<Mat> es(geom.pair.d2);
  const Vec lam = es.eigenvalues().cwiseMax(0.0);
  Vec inv_sqrt(p);
  for (int j = 0; j < p; ++j) inv_sqrt[j] = lam[j] > 0 ? 1.0 / std::sqrt(lam[j]) : 0.0;
  const Mat d_inv_sqrt = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();

  std::vector<Vec> dirs(n_dirs);
  const std::int64_t n_chunks =
      (static_cast<std::int64_t>(n_dirs) + CounterRng::kChunk - 1) / CounterRng::kChunk;
  parallel_chunks(n_chunks, [&](std::int64_t c) {
    CounterRng rng = CounterRng::stream(seed, tag, static_cast<std::uint64_t>(c));
    const std::int64_t lo = c * CounterRng::kChunk;
    const std::int64_t hi = std::min<std::int64_t>(lo + CounterRng::kChunk, n_dirs);
    for (std::int64_t i = lo; i < hi; ++i) {
      Vec z(p);
      for (int j = 0; j < p; ++j) z[j] = rng.normal();
      Vec u = d_inv_sqrt * z;
      const double dn = (geom.pair.d_sqrt * u).norm();
      dirs[i] = dn > 0 ? Vec(u / dn) : Vec(Vec::Zero(p));
    }
  });
  return dirs;
}

}  // namespace

RemainderReport estimate_omega(const Objective& f, const LocalGeometry& geom, int n_dirs,
                               int n_line, std::uint64_t seed) {
  if (n_dirs < 32 || n_line < 16) {
    throw PreconditionViolated("estimate_omega: need n_dirs >= 32, n_line >= 16");
  }
  const Vec& x = geom.center;
  const double f0 = evaluate(f, x);
  const Vec g0 = gradient(f, x);
  const Mat h0 = hessian(f, x);
  const auto dirs = d_sphere_directions(geom, n_dirs, seed, "remainders.omega");

  std::vector<double> best(n_dirs, 0.0);
  std::vector<double> best_t(n_dirs, 0.0);
  parallel_chunks(n_dirs, [&](std::int64_t i) {
    const Vec& u = dirs[i];
    if (u.squaredNorm() == 0.0) return;
    for (int j = 1; j <= n_line; ++j) {
      const double t = geom.local_radius * j / n_line;  // includes the boundary
      const Vec tu = t * u;
      const double d3 =
          (evaluate(f, x + tu) - f0 - g0.dot(tu)) - 0.5 * tu.dot(h0 * tu);
      const double ratio = 2.0 * std::abs(d3) / (t * t);  // ||D tu||^2 = t^2
      if (ratio > best[i]) {
        best[i] = ratio;
        best_t[i] = t;
      }
    }
  });

  RemainderReport rep;
  rep.directions_used = n_dirs;
  rep.line_points_used = n_line;
  rep.sup_attained_at = Vec::Zero(geom.pair.dim());
  for (int i = 0; i < n_dirs; ++i) {
    if (best[i] >= rep.omega) {
      rep.omega = best[i];
      rep.sup_attained_at = x + best_t[i] * dirs[i];
    }
  }
  return rep;
}

double estimate_alpha(const Objective& f, const LocalGeometry& geom, int n_dirs, int n_line,
                      std::uint64_t seed) {
  if (n_dirs < 32 || n_line < 16) {
    throw PreconditionViolated("estimate_alpha: need n_dirs >= 32, n_line >= 16");
  }
  const Vec& x = geom.center;
  const auto dirs = d_sphere_directions(geom, n_dirs, seed, "remainders.omega");

  std::vector<double> best(n_dirs, 0.0);
  parallel_chunks(n_dirs, [&](std::int64_t i) {
    const Vec& u = dirs[i];
    if (u.squaredNorm() == 0.0) return;
    for (int j = 0; j <= n_line; ++j) {
      const double t = geom.local_radius * j / n_line;
      const Vec tu = t * u;
      // |<grad^3 f(x + tu), (su)^3>| / ||D su||^2 maximized in the radius s
      // at the boundary; evaluate the third form per unit direction and
      // scale by the sup radius
      const double k3 = directional_derivative(f, x + tu, u, 3);
      const double ratio = std::abs(k3) * geom.local_radius;  // s^3/s^2 = s <= radius
      best[i] = std::max(best[i], ratio);
    }
  });
  double alpha = 0.0;
  for (double b : best) alpha = std::max(alpha, b);
  return alpha;
}

SelfConcordance estimate_self_concordance(const Objective& h, const LocalGeometry& geom, double n,
                                          int n_dirs, int n_line, std::uint64_t seed,
                                          bool want_fourth) {
  if (n <= 0) throw PreconditionViolated("estimate_self_concordance: n > 0");
  const Vec& x = geom.center;
  const Mat h2 = hessian(h, x);
  Eigen::SelfAdjointEigenSolver<Mat> es(h2, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw CurvatureSingular("estimate_self_concordance: grad^2 h(x*) not SPD");
  }
  const auto dirs = d_sphere_directions(geom, n_dirs, seed, "remainders.sc");

  std::vector<double> best3(n_dirs, 0.0), best4(n_dirs, 0.0);
  parallel_chunks(n_dirs, [&](std::int64_t i) {
    const Vec& u = dirs[i];
    if (u.squaredNorm() == 0.0) return;
    const double q = u.dot(h2 * u);
    if (q <= 0.0) return;
    const double q32 = std::pow(q, 1.5);
    for (int j = 0; j <= n_line; ++j) {
      const double t = geom.local_radius * j / n_line;
      const Vec xt = x + t * u;
      best3[i] = std::max(best3[i], std::abs(directional_derivative(h, xt, u, 3)) / q32);
      if (want_fourth) {
        best4[i] = std::max(best4[i], std::abs(directional_derivative(h, xt, u, 4)) / (q * q));
      }
    }
  });

  SelfConcordance sc;
  sc.n = n;
  sc.source = SelfConcordance::Source::estimated_sup;
  for (int i = 0; i < n_dirs; ++i) {
    sc.c3 = std::max(sc.c3, best3[i]);
    if (want_fourth) sc.c4 = std::max(sc.c4.value_or(0.0), best4[i]);
  }
  return sc;
}

TauBounds tau_moment_bounds(const SelfConcordance& sc, double p_g) {
  TauBounds tb;
  const double p1 = p_g + 1.0;
  tb.e_tau3 = sc.c3 / std::sqrt(sc.n) * std::pow(p1, 1.5);
  tb.e_tau4 = sc.c4 ? (*sc.c4 / sc.n * p1 * p1) : 0.0;
  tb.third_form_sq = sc.c3 * sc.c3 * std::pow(p_g + 2.0, 3.0) / sc.n;
  return tb;
}

McEstimate tau_moment_mc(const PrecisionPair& pair, const SelfConcordance& sc, int order,
                         int samples, std::uint64_t seed) {
  if (order != 3 && order != 4) throw UnsupportedOrder("tau_moment_mc: order in {3,4}");
  const double coeff =
      order == 3 ? sc.c3 / std::sqrt(sc.n) : sc.c4.value_or(0.0) / sc.n;
  McEstimate est;
  if (coeff == 0.0) return est;

  const Mat draws = sample_gaussian(pair, samples, seed);
  std::vector<double> vals(samples), sq(samples);
  parallel_chunks(samples, [&](std::int64_t i) {
    const double dn = (pair.d_sqrt * draws.row(i).transpose()).norm();
    const double v = coeff * std::pow(dn, order);
    vals[i] = v;
    sq[i] = v * v;
  });
  const double mean = pairwise_sum(vals) / samples;
  const double m2 = pairwise_sum(sq) / samples;
  est.value = mean;
  est.stderr_ = std::sqrt(std::max(0.0, m2 - mean * mean) / samples);
  return est;
}

}  // namespace laplace_kit
