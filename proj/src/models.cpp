#include "laplace_kit/models.hpp"

#include "laplace_kit/rng.hpp"

#include <cmath>
#include <set>

namespace laplace_kit {

namespace {

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void check_keys(const std::string& id, const std::map<std::string, double>& params,
                const std::set<std::string>& allowed) {
  for (const auto& [k, v] : params) {
    if (!allowed.count(k)) {
      throw ConfigError("model '" + id + "': unknown parameter '" + k + "'");
    }
  }
}

int int_param(const std::map<std::string, double>& params, const std::string& key, int fallback,
              int min_value) {
  const double v = get_param(params, key, fallback);
  const int i = static_cast<int>(std::llround(v));
  if (i < min_value || std::abs(v - i) > 1e-9) {
    throw ConfigError("parameter '" + key + "' must be an integer >= " +
                      std::to_string(min_value));
  }
  return i;
}

BuiltModel gaussian_linear(const std::map<std::string, double>& params, std::uint64_t seed) {
  check_keys("gaussian-linear", params, {"p", "n", "tau", "sigma"});
  const int p = int_param(params, "p", 2, 1);
  const int n = int_param(params, "n", 4 * p, 1);
  const double tau = get_param(params, "tau", 1.0);  // penalty G^2 = tau I
  const double sigma = get_param(params, "sigma", 0.1);
  if (!(tau > 0.0)) throw ConfigError("gaussian-linear: tau must be > 0");

  CounterRng rng = CounterRng::stream(seed, "model.gaussian-linear", 0);
  Mat a(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal() / std::sqrt(static_cast<double>(p));
  Vec x_true(p);
  for (int j = 0; j < p; ++j) x_true[j] = 0.5 * rng.normal();
  Vec z = a * x_true;
  for (int i = 0; i < n; ++i) z[i] += sigma * rng.normal();

  Objective ell;
  ell.dim = p;
  ell.value_fn = [a, z](const Vec& x) { return -0.5 * (a * x - z).squaredNorm(); };
  ell.gradient_fn = [a, z](const Vec& x) { return Vec(-a.transpose() * (a * x - z)); };
  ell.hessian_fn = [a](const Vec&) { return Mat(-a.transpose() * a); };
  ell.dir_deriv_fn = [](const Vec&, const Vec&, int) { return 0.0; };

  BuiltModel m;
  m.id = "gaussian-linear";
  m.objective = penalize(std::move(ell), tau * Mat::Identity(p, p), Vec::Zero(p));
  m.sample_size = n;
  m.start = Vec::Zero(p);
  const Mat ridge = a.transpose() * a + tau * Mat::Identity(p, p);
  m.closed_form_map = Vec(ridge.ldlt().solve(a.transpose() * z));
  return m;
}

// f(x) = scale * ( -||x||^4/4 - ||x - 1||^2 ); the scale plays the role of a
// sample size, so the likelihood part is l = scale * (-||x||^4/4) with
// penalty G^2 = 2 scale I around the all-ones point
BuiltModel quartic(const std::map<std::string, double>& params, int default_p) {
  check_keys("quartic", params, {"p", "scale"});
  const int p = int_param(params, "p", default_p, 1);
  const double scale = get_param(params, "scale", 400.0);
  if (!(scale > 0.0)) throw ConfigError("quartic: scale must be > 0");

  Objective ell;
  ell.dim = p;
  ell.value_fn = [scale](const Vec& x) {
    const double s = x.squaredNorm();
    return -0.25 * scale * s * s;
  };
  ell.gradient_fn = [scale](const Vec& x) { return Vec(-scale * x.squaredNorm() * x); };
  ell.hessian_fn = [scale, p](const Vec& x) {
    return Mat(-scale * (x.squaredNorm() * Mat::Identity(p, p) + 2.0 * x * x.transpose()));
  };
  ell.dir_deriv_fn = [scale](const Vec& x, const Vec& u, int order) {
    const double b = x.dot(u);
    const double c = u.squaredNorm();
    return order == 3 ? -6.0 * scale * b * c : -6.0 * scale * c * c;
  };
  ell.deriv_scale = 1.0;

  BuiltModel m;
  m.id = p == 1 ? "quartic-1d" : "quartic";
  m.objective = penalize(std::move(ell), 2.0 * scale * Mat::Identity(p, p), Vec::Ones(p));
  m.objective.sample_size_hint = scale;
  m.sample_size = scale;
  m.start = Vec::Ones(p);  // the penalty center
  m.iteration_g0_squared = Mat(10.0 * Mat::Identity(p, p));
  return m;
}

BuiltModel logistic(const std::map<std::string, double>& params, std::uint64_t seed) {
  check_keys("logistic", params, {"p", "n", "tau"});
  const int p = int_param(params, "p", 1, 1);
  const int n = int_param(params, "n", 100, 2);
  const double tau = get_param(params, "tau", 1.0);
  if (!(tau > 0.0)) throw ConfigError("logistic: tau must be > 0");

  CounterRng rng = CounterRng::stream(seed, "model.logistic", 0);
  Mat a(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal() / std::sqrt(static_cast<double>(p));
  Vec x_true = Vec::Constant(p, 0.5);
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    const double prob = 1.0 / (1.0 + std::exp(-a.row(i).dot(x_true)));
    y[i] = rng.uniform() < prob ? 1.0 : 0.0;
  }

  Objective ell;
  ell.dim = p;
  ell.value_fn = [a, y, n](const Vec& x) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
      const double eta = a.row(i).dot(x);
      // log(1 + e^eta) evaluated stably
      const double lse = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
      v += y[i] * eta - lse;
    }
    return v;
  };
  ell.gradient_fn = [a, y, n, p](const Vec& x) {
    Vec g = Vec::Zero(p);
    for (int i = 0; i < n; ++i) {
      const double s = 1.0 / (1.0 + std::exp(-a.row(i).dot(x)));
      g += (y[i] - s) * a.row(i).transpose();
    }
    return g;
  };
  ell.hessian_fn = [a, n, p](const Vec& x) {
    Mat h = Mat::Zero(p, p);
    for (int i = 0; i < n; ++i) {
      const double s = 1.0 / (1.0 + std::exp(-a.row(i).dot(x)));
      h -= s * (1.0 - s) * a.row(i).transpose() * a.row(i);
    }
    return h;
  };
  ell.dir_deriv_fn = [a, n](const Vec& x, const Vec& u, int order) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s = 1.0 / (1.0 + std::exp(-a.row(i).dot(x)));
      const double beta = a.row(i).dot(u);
      const double sp = s * (1.0 - s);
      if (order == 3) {
        v -= sp * (1.0 - 2.0 * s) * beta * beta * beta;
      } else {
        v -= sp * (1.0 - 6.0 * s + 6.0 * s * s) * beta * beta * beta * beta;
      }
    }
    return v;
  };

  BuiltModel m;
  m.id = "logistic";
  m.objective = penalize(std::move(ell), tau * Mat::Identity(p, p), Vec::Zero(p));
  m.objective.sample_size_hint = n;
  m.sample_size = n;
  m.start = Vec::Zero(p);
  return m;
}

BuiltModel inverse_family(const std::string& family, const std::map<std::string, double>& params,
                          std::uint64_t seed) {
  check_keys(family + "-inverse", params, {"p", "n", "sigma"});
  const int p = int_param(params, "p", 2, 1);
  const int n = int_param(params, "n", 50, 1);
  const double sigma = get_param(params, "sigma", 0.0);
  if (sigma < 0.0) throw ConfigError("sigma must be >= 0");

  SyntheticProblem prob = make_synthetic(family, p, n, sigma, seed);
  BuiltModel m;
  m.id = family + "-inverse";
  m.objective = penalized_objective(prob.spec);
  m.sample_size = n;
  m.start = prob.spec.prior_mean;
  m.inverse = std::move(prob);
  return m;
}

}  // namespace

BuiltModel build_model(const std::string& id, const std::map<std::string, double>& params,
                       std::uint64_t seed) {
  if (id == "gaussian-linear") return gaussian_linear(params, seed);
  if (id == "quartic") return quartic(params, 3);
  if (id == "quartic-1d") {
    if (params.count("p") && params.at("p") != 1.0) {
      throw ConfigError("quartic-1d: p is fixed to 1 (use 'quartic' for p > 1)");
    }
    auto q = params;
    q["p"] = 1.0;
    return quartic(q, 1);
  }
  if (id == "logistic") return logistic(params, seed);
  if (id == "exp-inverse") return inverse_family("exp", params, seed);
  if (id == "sigmoid-inverse") return inverse_family("sigmoid", params, seed);
  throw UnknownModel("no built-in model '" + id + "'; known: gaussian-linear, quartic, "
                     "quartic-1d, logistic, exp-inverse, sigmoid-inverse");
}

std::vector<std::string> model_registry() {
  return {"gaussian-linear", "quartic", "quartic-1d", "logistic", "exp-inverse",
          "sigmoid-inverse"};
}

}  // namespace laplace_kit
