#pragma once

#include "laplace_kit/common.hpp"
#include "laplace_kit/objective.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace laplace_kit {

// optional restriction set {x : ||Q (x - center)|| <= radius}; draws outside
// it are rejected, mirroring the inverse-problem sampling scheme
struct RestrictSet {
  Vec center;
  Mat q;
  double radius = 0.0;
};

struct IterationConfig {
  Vec x0;
  Mat g0_squared;                  // G_0^2
  double precision_factor = 1.5;   // a > 1
  int samples_per_step = 512;      // M
  int max_steps = 100;
  double step_tolerance = 1e-6;
  std::uint64_t seed = 0;
  std::optional<RestrictSet> restrict_to;
  // optional feedback G_{k+1}^2 = a * (weighted precision estimate);
  // off by default: the base schedule is G_{k+1}^2 = a G_k^2
  bool covariance_feedback = false;
  // quasi Monte-Carlo sampling (digitally shifted Sobol points mapped through
  // the inverse normal CDF); removes most of the Monte-Carlo noise that the
  // geometrically growing precision would otherwise freeze into the iterate.
  // Falls back to plain Monte-Carlo when dim exceeds the Sobol table.
  bool use_qmc = true;
};

struct StepStats {
  double ess = 0.0;  // (sum w)^2 / sum w^2
  double max_log_weight = 0.0;
  int accepted_draws = 0;
  int rejected_draws = 0;
  bool degenerate_weights = false;
  int retries = 0;
  Mat weighted_cov;  // importance-weighted covariance around the new mean
};

struct IterationRecord {
  int k = 0;
  Vec x;
  double log_precision_scale = 0.0;  // log ||G_k^2|| / ||G_0^2||
  StepStats stats;
};

struct IterationTrace {
  std::vector<IterationRecord> steps;
  bool converged = false;
  Vec best_x;
  double best_value = 0.0;
};

std::pair<Vec, StepStats> step(const Objective& ell, const Vec& x_k, const Mat& gk2, int m,
                               std::uint64_t seed, const std::optional<RestrictSet>& restrict_to,
                               bool use_qmc = true);

IterationTrace run(const Objective& ell, const IterationConfig& config);

}  // namespace laplace_kit
