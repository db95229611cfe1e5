#include "laplace_kit/iterations.hpp"

#include "laplace_kit/geometry.hpp"
#include "laplace_kit/qmc.hpp"
#include "laplace_kit/rng.hpp"

#include <cmath>

namespace laplace_kit {

namespace {

std::pair<Vec, StepStats> one_pass(const Objective& ell, const Vec& x_k, const Mat& gk2, int m,
                                   std::uint64_t seed,
                                   const std::optional<RestrictSet>& restrict_to, bool use_qmc) {
  const int p = static_cast<int>(x_k.size());
  const Eigen::LLT<Mat> llt = chol_spd(gk2, "laplace-iterations G_k^2");
  const Mat lt = llt.matrixL().transpose();
  const bool qmc = use_qmc && p <= SobolSequence::kMaxDim;
  std::optional<SobolSequence> sobol;
  if (qmc) sobol.emplace(p, seed);

  Mat draws(m, p);
  std::vector<int> accepted(m, 0);
  const std::int64_t n_chunks = (m + CounterRng::kChunk - 1) / CounterRng::kChunk;
  int rejected_total = 0;
  std::vector<int> rejected(n_chunks, 0);
  parallel_chunks(n_chunks, [&](std::int64_t c) {
    CounterRng rng = CounterRng::stream(seed, "laplace-iterations.step", static_cast<std::uint64_t>(c));
    const std::int64_t lo = c * CounterRng::kChunk;
    const std::int64_t hi = std::min<std::int64_t>(lo + CounterRng::kChunk, m);
    std::vector<double> u(p);
    for (std::int64_t i = lo; i < hi; ++i) {
      for (int attempt = 0; attempt < 1000; ++attempt) {
        Vec z(p);
        if (qmc) {
          // rejected slots retry with distinct indices further down the sequence
          sobol->point(static_cast<std::uint64_t>(i) +
                           static_cast<std::uint64_t>(attempt) * static_cast<std::uint64_t>(m),
                       u.data());
          for (int j = 0; j < p; ++j) z[j] = inverse_normal_cdf(u[j]);
        } else {
          for (int j = 0; j < p; ++j) z[j] = rng.normal();
        }
        Vec x = x_k + lt.triangularView<Eigen::Upper>().solve(z);
        if (restrict_to &&
            (restrict_to->q * (x - restrict_to->center)).norm() > restrict_to->radius) {
          ++rejected[c];
          continue;
        }
        draws.row(i) = x.transpose();
        accepted[i] = 1;
        break;
      }
    }
  });
  for (std::int64_t c = 0; c < n_chunks; ++c) rejected_total += rejected[c];

  StepStats st;
  st.rejected_draws = rejected_total;
  for (int i = 0; i < m; ++i) st.accepted_draws += accepted[i];
  if (st.accepted_draws == 0) throw AllDrawsRejected("laplace-iterations: no draw inside the set");

  std::vector<double> logw(m, -std::numeric_limits<double>::infinity());
  parallel_chunks(m, [&](std::int64_t i) {
    if (accepted[i]) logw[i] = evaluate(ell, draws.row(i).transpose());
  });
  double max_lw = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) max_lw = std::max(max_lw, logw[i]);
  st.max_log_weight = max_lw;

  std::vector<double> w(m, 0.0), wsq(m, 0.0);
  std::vector<Vec> wx(m, Vec::Zero(p));
  for (int i = 0; i < m; ++i) {
    if (!accepted[i]) continue;
    w[i] = std::exp(logw[i] - max_lw);
    wsq[i] = w[i] * w[i];
    wx[i] = w[i] * draws.row(i).transpose();
  }
  const double sw = pairwise_sum(w);
  const double sw2 = pairwise_sum(wsq);
  const Vec sx = pairwise_sum(wx);
  st.ess = sw2 > 0 ? sw * sw / sw2 : 0.0;
  st.degenerate_weights = st.ess < 1.0 + 1e-9;
  const Vec mean = sx / sw;
  Mat cov = Mat::Zero(p, p);
  for (int i = 0; i < m; ++i) {
    if (!accepted[i]) continue;
    const Vec d = draws.row(i).transpose() - mean;
    cov.noalias() += w[i] * d * d.transpose();
  }
  st.weighted_cov = cov / sw;
  return {mean, st};
}

}  // namespace

std::pair<Vec, StepStats> step(const Objective& ell, const Vec& x_k, const Mat& gk2, int m,
                               std::uint64_t seed,
                               const std::optional<RestrictSet>& restrict_to, bool use_qmc) {
  if (m < 2) throw PreconditionViolated("step: M >= 2");
  auto [x, st] = one_pass(ell, x_k, gk2, m, seed, restrict_to, use_qmc);
  if (st.ess < 0.01 * m) {
    // importance weights degenerate: retry once with a doubled budget
    auto [x2, st2] = one_pass(ell, x_k, gk2, 2 * m, CounterRng::mix64(seed) ^ 0x5851f42d4c957f2dULL,
                              restrict_to, use_qmc);
    st2.retries = 1;
    return {x2, st2};
  }
  return {x, st};
}

IterationTrace run(const Objective& ell, const IterationConfig& config) {
  if (!(config.precision_factor > 1.0)) {
    throw PreconditionViolated("run: precision_factor must be > 1");
  }
  if (config.samples_per_step < 2) throw PreconditionViolated("run: M >= 2");

  IterationTrace trace;
  Vec x = config.x0;
  Mat gk2 = config.g0_squared;
  const double g0_norm = gk2.norm();
  trace.best_x = x;
  trace.best_value = evaluate(ell, x);

  for (int k = 0; k < config.max_steps; ++k) {
    const std::uint64_t step_seed = CounterRng::mix64(config.seed + 0x9e3779b97f4a7c15ULL * k);
    auto [x_next, st] = step(ell, x, gk2, config.samples_per_step, step_seed, config.restrict_to,
                             config.use_qmc);

    IterationRecord rec;
    rec.k = k;
    rec.x = x_next;
    rec.log_precision_scale = std::log(gk2.norm() / g0_norm);
    rec.stats = st;
    trace.steps.push_back(rec);

    const double v = evaluate(ell, x_next);
    if (v > trace.best_value) {
      trace.best_value = v;
      trace.best_x = x_next;
    }
    const bool small_step = (x_next - x).norm() <= config.step_tolerance * (1.0 + x.norm());
    x = x_next;
    if (small_step) {
      trace.converged = true;
      break;
    }
    if (gk2.norm() < 1e12) {  // cap: beyond this the sampling is degenerate
      if (config.covariance_feedback && st.weighted_cov.size() > 0 && !st.degenerate_weights) {
        const Eigen::LLT<Mat> c = chol_spd(st.weighted_cov, "covariance feedback");
        gk2 = config.precision_factor *
              c.solve(Mat::Identity(st.weighted_cov.rows(), st.weighted_cov.cols()));
      } else {
        gk2 = config.precision_factor * gk2;
      }
    }
  }
  return trace;
}

}  // namespace laplace_kit
