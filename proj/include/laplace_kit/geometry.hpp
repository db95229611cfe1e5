#pragma once

#include "laplace_kit/common.hpp"

#include <cstdint>

namespace laplace_kit {

// Cholesky with escalating diagonal jitter (1e-12 * ||A||, x10 up to
// 1e-6 * ||A||); throws SingularPrecision past the cap.
Eigen::LLT<Mat> chol_spd(const Mat& a, const char* what);

// Symmetric PSD square root; eigenvalues clamped at zero.
Mat spd_sqrt(const Mat& a);

// D^2 = -grad^2 l(x*), D_G^2 = D^2 + G^2, B_G = D_G^{-1} D^2 D_G^{-1}.
struct PrecisionPair {
  Mat d2;
  Mat dg2;
  Eigen::LLT<Mat> chol_dg2;
  Mat b_matrix;
  Mat d_sqrt;  // SPD square root of d2, for ||D u|| norms

  int dim() const { return static_cast<int>(d2.rows()); }

  static PrecisionPair from_curvatures(Mat d2, Mat g2);
  // when only D_G^2 = D^2 + G^2 and G^2 are at hand
  static PrecisionPair from_total(const Mat& dg2, const Mat& g2);
};

struct LocalGeometry {
  Vec center;        // x*
  PrecisionPair pair;
  double p_g = 0.0;
  double deviation_x = 4.0;  // the tail level, e^{-x}
  double nu = 2.0 / 3.0;
  double r_g = 0.0;          // 2 sqrt(p_G) + sqrt(2 x)
  double local_radius = 0.0; // r_G / nu, in the ||D .|| norm
};

LocalGeometry make_local_geometry(Vec center, PrecisionPair pair, double deviation_x = 4.0,
                                  double nu = 2.0 / 3.0);

double effective_dimension(const PrecisionPair& pair);
double concentration_radius(double p_g, double x);

// radius r with P(||T gamma|| > r) <= e^{-x} for B = T T^t; reconstructed
// from how the tail theorem is invoked, not from a verbatim statement
double gaussian_ball_radius(const Mat& b, double x);

struct QfTail {
  double bound = 1.0;
  bool applicable = false;  // false when z < sqrt(p_g)
};
// P(||D gamma_G|| > z) <= exp(-(z - sqrt(p_g))^2 / 2) for z >= sqrt(p_g)
QfTail qf_tail_bound(double p_g, double z);

// E ||T gamma||^order for B = T T^t; order in {2, 4, 6}
double gaussian_norm_even_moment(const Mat& b, int order);

struct DetBounds {
  double plus_bound = 1.0;           // bound for det(I + w B_G)
  double minus_invsqrt_bound = 1.0;  // bound for det(I - w B_G)^{-1/2}
  double plus_exact = 1.0;
  double minus_invsqrt_exact = 1.0;
};
DetBounds det_contiguity_bounds(double omega, const PrecisionPair& pair);

// rows are draws from N(0, D_G^{-2}); deterministic in (seed, count, dim)
// and identical for any worker count
Mat sample_gaussian(const PrecisionPair& pair, int count, std::uint64_t seed);

bool in_local_set(const LocalGeometry& geom, const Vec& point);

}  // namespace laplace_kit
