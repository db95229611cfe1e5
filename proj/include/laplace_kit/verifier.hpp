#pragma once

#include "laplace_kit/certificate.hpp"
#include "laplace_kit/common.hpp"
#include "laplace_kit/geometry.hpp"
#include "laplace_kit/objective.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace laplace_kit {

// tensor-product grid over a box, log-domain, trapezoid normalization
struct GridPosterior {
  std::vector<std::pair<double, double>> box;  // per-axis (lo, hi)
  std::vector<int> resolution;
  std::vector<double> log_density_grid;  // normalized: log density
  double log_normalizer = 0.0;
  double cell_volume = 0.0;

  int dim() const { return static_cast<int>(box.size()); }
  Vec point(std::int64_t flat_index) const;
  // trapezoid weight (product of 1/2 factors on boundary axes) for a node
  double quad_weight(std::int64_t flat_index) const;
  std::int64_t size() const { return static_cast<std::int64_t>(log_density_grid.size()); }
};

GridPosterior grid_posterior(const Objective& f, const Vec& center, const PrecisionPair& pair,
                             double box_sigmas, int resolution);

struct GridTv {
  double tv = 0.0;
  double quaderr = 0.0;  // from comparing against a half-resolution pass
};
GridTv tv_grid(const GridPosterior& gp, const Vec& mean, const Mat& precision);

struct GridKl {
  double kl = 0.0;      // KL(grid || gaussian)
  double reverse = 0.0; // KL(gaussian || grid)
  bool infinite = false;
};
GridKl kl_grid(const GridPosterior& gp, const Vec& mean, const Mat& precision);

// posterior mass outside {x : ||D (x - center)|| <= radius}, by quadrature
double tail_mass_grid(const GridPosterior& gp, const Vec& center, const Mat& d_sqrt,
                      double radius);
Vec mean_grid(const GridPosterior& gp);

struct IsFunctionals {
  Vec mean;
  Vec mean_stderr;
  double tail_mass_u = 0.0;    // mass outside the local set
  double tail_stderr = 0.0;
  double ess = 0.0;
  // P(||D (X - center)|| <= r) on 64 radii, with Gaussian counterparts
  std::vector<double> radii;
  std::vector<double> ball_prob;
  std::vector<double> ball_prob_stderr;
  std::vector<double> ball_prob_gauss;  // same radii under the Laplace Gaussian
};
IsFunctionals posterior_functionals_is(const Objective& f, const LocalGeometry& geom,
                                       double inflation, int m, std::uint64_t seed);

struct SoundnessRow {
  std::string name;
  double empirical = 0.0;
  double error = 0.0;  // stderr or quadrature error
  double bound = 0.0;
  bool gate_valid = true;
  bool holds = true;
  double slack_ratio = 0.0;
};
struct SoundnessReport {
  std::vector<SoundnessRow> rows;
  std::vector<std::string> missing;
  bool all_hold = true;  // over gate-valid rows
};

struct EmpiricalQuantities {
  std::optional<double> tv;
  std::optional<double> tv_err;
  std::optional<double> ball_class_discrepancy;
  std::optional<double> ball_class_err;
  std::optional<double> kl;
  std::optional<double> kl_err;
  std::optional<double> tail_mass;
  std::optional<double> tail_err;
  std::optional<double> mean_shift_d_norm;
  std::optional<double> mean_shift_err;
};

SoundnessReport soundness_report(const LaplaceCertificate& cert,
                                 const EmpiricalQuantities& empirical);

}  // namespace laplace_kit
