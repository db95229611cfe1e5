#include "laplace_kit/geometry.hpp"

#include "laplace_kit/rng.hpp"

#include <cmath>

namespace laplace_kit {

Eigen::LLT<Mat> chol_spd(const Mat& a, const char* what) {
  const Mat sym = 0.5 * (a + a.transpose());
  const double scale = sym.cwiseAbs().maxCoeff();
  Eigen::LLT<Mat> llt(sym);
  if (llt.info() == Eigen::Success) return llt;
  for (double jitter = 1e-12; jitter <= 1e-6 * 1.0000001; jitter *= 10.0) {
    Mat shifted = sym;
    shifted.diagonal().array() += jitter * (scale > 0 ? scale : 1.0);
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw SingularPrecision(std::string(what) + ": not SPD within jitter policy");
}

Mat spd_sqrt(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()));
  Vec lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

PrecisionPair PrecisionPair::from_curvatures(Mat d2, Mat g2) {
  if (d2.rows() != g2.rows() || d2.cols() != g2.cols()) {
    throw DimensionMismatch("PrecisionPair: D^2 / G^2 shapes");
  }
  PrecisionPair p;
  p.d2 = 0.5 * (d2 + d2.transpose());
  p.dg2 = p.d2 + 0.5 * (g2 + g2.transpose());
  p.chol_dg2 = chol_spd(p.dg2, "PrecisionPair D_G^2");
  // B_G = L^{-1} D^2 L^{-T} shares eigenvalues with D_G^{-1} D^2 D_G^{-1}
  // and has the same trace; it is what every bound consumes.
  const Mat l = p.chol_dg2.matrixL();
  Mat li_d2 = l.triangularView<Eigen::Lower>().solve(p.d2);
  Mat b = l.triangularView<Eigen::Lower>().solve(Mat(li_d2.transpose())).transpose();
  p.b_matrix = 0.5 * (b + b.transpose());
  p.d_sqrt = spd_sqrt(p.d2);
  return p;
}

PrecisionPair PrecisionPair::from_total(const Mat& dg2, const Mat& g2) {
  return from_curvatures(dg2 - g2, g2);
}

double effective_dimension(const PrecisionPair& pair) {
  const double t = pair.b_matrix.trace();
  return std::max(0.0, t);
}

double concentration_radius(double p_g, double x) {
  return 2.0 * std::sqrt(p_g) + std::sqrt(2.0 * x);
}

LocalGeometry make_local_geometry(Vec center, PrecisionPair pair, double deviation_x, double nu) {
  if (!(nu > 0.0 && nu < 1.0)) throw PreconditionViolated("nu must be in (0,1)");
  if (!(deviation_x > 0.0)) throw PreconditionViolated("deviation_x must be positive");
  LocalGeometry g;
  g.center = std::move(center);
  g.p_g = effective_dimension(pair);
  g.pair = std::move(pair);
  g.deviation_x = deviation_x;
  g.nu = nu;
  g.r_g = concentration_radius(g.p_g, deviation_x);
  g.local_radius = g.r_g / nu;
  return g;
}

double gaussian_ball_radius(const Mat& b, double x) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (b + b.transpose()), Eigen::EigenvaluesOnly);
  const double tr = std::max(0.0, es.eigenvalues().sum());
  const double op = std::max(0.0, es.eigenvalues().maxCoeff());
  return std::sqrt(tr) + std::sqrt(2.0 * x * op);
}

QfTail qf_tail_bound(double p_g, double z) {
  QfTail t;
  if (z < std::sqrt(p_g)) {
    t.bound = 1.0;
    t.applicable = false;
    return t;
  }
  const double d = z - std::sqrt(p_g);
  t.bound = std::min(1.0, std::exp(-0.5 * d * d));
  t.applicable = true;
  return t;
}

double gaussian_norm_even_moment(const Mat& b, int order) {
  const Mat s = 0.5 * (b + b.transpose());
  const double t1 = s.trace();
  switch (order) {
    case 2:
      return t1;
    case 4: {
      const double t2 = (s * s).trace();
      return t1 * t1 + 2.0 * t2;
    }
    case 6: {
      const Mat s2 = s * s;
      const double t2 = s2.trace();
      const double t3 = (s2 * s).trace();
      return t1 * t1 * t1 + 6.0 * t1 * t2 + 8.0 * t3;
    }
    default:
      throw UnsupportedOrder("gaussian_norm_even_moment: order must be 2, 4 or 6");
  }
}

DetBounds det_contiguity_bounds(double omega, const PrecisionPair& pair) {
  if (omega > 1.0 / 3.0 + 1e-15) throw OmegaTooLarge("det_contiguity_bounds needs omega <= 1/3");
  if (omega < 0.0) throw OmegaOutOfRange("omega must be nonnegative");
  const double p_g = effective_dimension(pair);
  DetBounds db;
  db.plus_bound = std::exp(omega * p_g);
  db.minus_invsqrt_bound = std::exp(1.5 * std::log(1.5) * omega * p_g);
  Eigen::SelfAdjointEigenSolver<Mat> es(pair.b_matrix, Eigen::EigenvaluesOnly);
  double dplus = 1.0, dminus = 1.0;
  for (double lam : es.eigenvalues()) {
    dplus *= 1.0 + omega * lam;
    dminus *= 1.0 - omega * lam;
  }
  db.plus_exact = dplus;
  db.minus_invsqrt_exact = 1.0 / std::sqrt(dminus);
  return db;
}

Mat sample_gaussian(const PrecisionPair& pair, int count, std::uint64_t seed) {
  if (count < 1) throw PreconditionViolated("sample_gaussian: count >= 1");
  const int p = pair.dim();
  Mat z(count, p);
  const std::int64_t n_chunks =
      (static_cast<std::int64_t>(count) + CounterRng::kChunk - 1) / CounterRng::kChunk;
  parallel_chunks(n_chunks, [&](std::int64_t c) {
    CounterRng rng = CounterRng::stream(seed, "gauss-geometry.sample", static_cast<std::uint64_t>(c));
    const std::int64_t lo = c * CounterRng::kChunk;
    const std::int64_t hi = std::min<std::int64_t>(lo + CounterRng::kChunk, count);
    for (std::int64_t i = lo; i < hi; ++i) {
      for (int j = 0; j < p; ++j) z(i, j) = rng.normal();
    }
  });
  // x = L^{-T} z per draw, so cov(x) = (L L^t)^{-1} = D_G^{-2}
  const Mat l = pair.chol_dg2.matrixL();
  Mat xt = l.transpose().triangularView<Eigen::Upper>().solve(Mat(z.transpose()));
  return xt.transpose();
}

bool in_local_set(const LocalGeometry& geom, const Vec& point) {
  require_dim(point, geom.pair.dim(), "in_local_set: point");
  const double r = (geom.pair.d_sqrt * (point - geom.center)).norm();
  return r <= geom.local_radius;
}

}  // namespace laplace_kit
