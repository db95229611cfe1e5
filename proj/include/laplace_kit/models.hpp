#pragma once

#include "laplace_kit/common.hpp"
#include "laplace_kit/inverse.hpp"
#include "laplace_kit/iterations.hpp"
#include "laplace_kit/objective.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace laplace_kit {

// A built-in experiment model: the penalized objective plus whatever
// reference information the model family can provide.
struct BuiltModel {
  std::string id;
  PenalizedObjective objective;
  double sample_size = 1.0;  // n in -l = n h; drives the 1/sqrt(n) terms
  Vec start;                 // solver / optimizer starting point

  // family-specific extras
  std::optional<Vec> closed_form_map;           // gaussian-linear: ridge solution
  std::optional<SyntheticProblem> inverse;      // exp-inverse / sigmoid-inverse
  std::optional<Mat> iteration_g0_squared;      // default G_0^2 for the optimizer
};

// ids: gaussian-linear, quartic, quartic-1d, logistic, exp-inverse,
// sigmoid-inverse. Unknown parameter names are rejected.
BuiltModel build_model(const std::string& id, const std::map<std::string, double>& params,
                       std::uint64_t seed);

std::vector<std::string> model_registry();

}  // namespace laplace_kit
