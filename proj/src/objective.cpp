#include "laplace_kit/objective.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>

namespace laplace_kit {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double checked_value(const Objective& obj, const Vec& x) {
  const double v = obj.value_fn(x);
  if (!std::isfinite(v)) throw DomainError("non-finite objective value");
  return v;
}

}  // namespace

// --- worker pool (common.hpp) --------------------------------------------

namespace {
std::atomic<int> g_threads{0};

int env_threads() {
  if (const char* s = std::getenv("LAPLACE_KIT_THREADS")) {
    const int n = std::atoi(s);
    if (n > 0) return n;
  }
  return 1;
}
}  // namespace

int thread_count() {
  const int n = g_threads.load();
  return n > 0 ? n : env_threads();
}

void set_thread_count(int n) { g_threads.store(n); }

void parallel_chunks(std::int64_t n_chunks, const std::function<void(std::int64_t)>& fn) {
  const int workers = std::min<std::int64_t>(thread_count(), n_chunks);
  if (workers <= 1) {
    for (std::int64_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t c = next.fetch_add(1);
        if (c >= n_chunks) return;
        try {
          fn(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double pairwise_sum(const std::vector<double>& terms) {
  std::function<double(std::size_t, std::size_t)> rec = [&](std::size_t lo,
                                                            std::size_t hi) -> double {
    if (hi - lo <= 8) {
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += terms[i];
      return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return rec(lo, mid) + rec(mid, hi);
  };
  return terms.empty() ? 0.0 : rec(0, terms.size());
}

Vec pairwise_sum(const std::vector<Vec>& terms) {
  if (terms.empty()) return Vec();
  std::function<Vec(std::size_t, std::size_t)> rec = [&](std::size_t lo, std::size_t hi) -> Vec {
    if (hi - lo <= 8) {
      Vec s = Vec::Zero(terms[lo].size());
      for (std::size_t i = lo; i < hi; ++i) s += terms[i];
      return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return rec(lo, mid) + rec(mid, hi);
  };
  return rec(0, terms.size());
}

// --- derivatives -----------------------------------------------------------

double evaluate(const Objective& obj, const Vec& x) {
  require_dim(x, obj.dim, "evaluate: x");
  return checked_value(obj, x);
}

Vec gradient(const Objective& obj, const Vec& x) {
  require_dim(x, obj.dim, "gradient: x");
  if (obj.gradient_fn) {
    Vec g = obj.gradient_fn(x);
    if (!g.allFinite()) throw DomainError("non-finite gradient");
    return g;
  }
  const double h = obj.deriv_scale * std::cbrt(kEps);
  Vec g(obj.dim);
  Vec xp = x;
  for (int j = 0; j < obj.dim; ++j) {
    const double xj = x[j];
    xp[j] = xj + h;
    const double fp = checked_value(obj, xp);
    xp[j] = xj - h;
    const double fm = checked_value(obj, xp);
    xp[j] = xj;
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Mat hessian(const Objective& obj, const Vec& x) {
  require_dim(x, obj.dim, "hessian: x");
  Mat h_out;
  if (obj.hessian_fn) {
    h_out = obj.hessian_fn(x);
  } else if (obj.gradient_fn) {
    // central differences of the analytic gradient
    const double h = obj.deriv_scale * std::cbrt(kEps);
    h_out.resize(obj.dim, obj.dim);
    Vec xp = x;
    for (int j = 0; j < obj.dim; ++j) {
      const double xj = x[j];
      xp[j] = xj + h;
      const Vec gp = obj.gradient_fn(xp);
      xp[j] = xj - h;
      const Vec gm = obj.gradient_fn(xp);
      xp[j] = xj;
      h_out.col(j) = (gp - gm) / (2.0 * h);
    }
  } else {
    // second differences of values, step eps^{1/4}
    const double h = obj.deriv_scale * std::pow(kEps, 0.25);
    h_out.resize(obj.dim, obj.dim);
    const double f0 = checked_value(obj, x);
    Vec xp = x;
    for (int j = 0; j < obj.dim; ++j) {
      for (int k = j; k < obj.dim; ++k) {
        double v;
        if (j == k) {
          xp[j] = x[j] + h;
          const double fp = checked_value(obj, xp);
          xp[j] = x[j] - h;
          const double fm = checked_value(obj, xp);
          xp[j] = x[j];
          v = (fp - 2.0 * f0 + fm) / (h * h);
        } else {
          xp[j] = x[j] + h;
          xp[k] = x[k] + h;
          const double fpp = checked_value(obj, xp);
          xp[k] = x[k] - h;
          const double fpm = checked_value(obj, xp);
          xp[j] = x[j] - h;
          const double fmm = checked_value(obj, xp);
          xp[k] = x[k] + h;
          const double fmp = checked_value(obj, xp);
          xp[j] = x[j];
          xp[k] = x[k];
          v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        }
        h_out(j, k) = v;
        h_out(k, j) = v;
      }
    }
  }
  if (!h_out.allFinite()) throw DomainError("non-finite Hessian");
  return 0.5 * (h_out + h_out.transpose());
}

double directional_derivative(const Objective& obj, const Vec& x, const Vec& u, int order) {
  require_dim(x, obj.dim, "directional_derivative: x");
  require_dim(u, obj.dim, "directional_derivative: u");
  if (order != 3 && order != 4) throw UnsupportedOrder("order must be 3 or 4");
  if (obj.dir_deriv_fn) return obj.dir_deriv_fn(x, u, order);

  const double unorm = u.norm();
  if (unorm == 0.0) return 0.0;
  const double h = obj.deriv_scale * std::pow(kEps, 1.0 / (order + 2)) / unorm;

  auto at = [&](int i) {
    const double v = obj.value_fn(x + (i * h) * u);
    if (!std::isfinite(v)) throw StencilOutOfDomain("stencil point gave non-finite value");
    return v;
  };

  if (order == 3) {
    // 7-point, 4th-order accurate third derivative
    static const double c[7] = {1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8};
    double s = 0.0;
    for (int i = -3; i <= 3; ++i) s += c[i + 3] * at(i);
    return s / (h * h * h);
  }
  // 9-point, 4th-order accurate fourth derivative
  static const double c[9] = {7.0 / 240, -2.0 / 5,   169.0 / 60, -122.0 / 15, 91.0 / 8,
                              -122.0 / 15, 169.0 / 60, -2.0 / 5,   7.0 / 240};
  double s = 0.0;
  for (int i = -4; i <= 4; ++i) s += c[i + 4] * at(i);
  return s / (h * h * h * h);
}

DirectionalTaylor directional_taylor(const Objective& obj, const Vec& x, const Vec& u,
                                     bool want_fourth) {
  DirectionalTaylor t;
  t.base_point = x;
  t.direction = u;
  t.method = obj.has_analytic_dir_deriv() ? DerivMethod::analytic : DerivMethod::finite_difference;
  t.k3 = directional_derivative(obj, x, u, 3);
  if (want_fourth) t.k4 = directional_derivative(obj, x, u, 4);
  return t;
}

// --- penalized decomposition ------------------------------------------------

Objective PenalizedObjective::total() const {
  const Objective& l = likelihood;
  const Mat g2 = penalty_precision;
  const Vec x0 = prior_mean;
  Objective f;
  f.dim = l.dim;
  f.deriv_scale = l.deriv_scale;
  f.value_fn = [l, g2, x0](const Vec& x) {
    const Vec d = x - x0;
    return l.value_fn(x) - 0.5 * d.dot(g2 * d);
  };
  // analytic-first through the likelihood's own resolution; the penalty part
  // is exact either way
  f.gradient_fn = [l, g2, x0](const Vec& x) { return Vec(gradient(l, x) - g2 * (x - x0)); };
  f.hessian_fn = [l, g2](const Vec& x) { return Mat(hessian(l, x) - g2); };
  // the quadratic penalty has no third or fourth derivative
  f.dir_deriv_fn = [l](const Vec& x, const Vec& u, int order) {
    return directional_derivative(l, x, u, order);
  };
  return f;
}

PenalizedObjective penalize(Objective likelihood, Mat g2, Vec x0) {
  if (g2.rows() != likelihood.dim || g2.cols() != likelihood.dim) {
    throw DimensionMismatch("penalize: G^2 shape");
  }
  require_dim(x0, likelihood.dim, "penalize: x0");
  const Mat sym = 0.5 * (g2 + g2.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12 * es.eigenvalues().cwiseAbs().maxCoeff() - 1e-300) {
    throw PreconditionViolated("penalize: G^2 is not positive semi-definite");
  }
  PenalizedObjective p;
  p.likelihood = std::move(likelihood);
  p.penalty_precision = sym;
  p.prior_mean = std::move(x0);
  return p;
}

}  // namespace laplace_kit
