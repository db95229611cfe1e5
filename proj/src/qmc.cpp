#include "laplace_kit/qmc.hpp"

#include "laplace_kit/common.hpp"
#include "laplace_kit/rng.hpp"

#include <cmath>

namespace laplace_kit {

namespace {

// Joe-Kuo table ("new-joe-kuo-6"), dimensions 2..8. Dimension 1 is the van
// der Corput sequence in base 2 and needs no table entry.
struct JoeKuoRow {
  int s;                    // degree of the primitive polynomial
  std::uint32_t a;          // polynomial coefficients (excluding leading/trailing 1)
  std::uint32_t m[5];       // initial direction integers m_1..m_s (odd)
};

constexpr JoeKuoRow kJoeKuo[] = {
    {1, 0, {1, 0, 0, 0, 0}},    // dim 2
    {2, 1, {1, 3, 0, 0, 0}},    // dim 3
    {3, 1, {1, 3, 1, 0, 0}},    // dim 4
    {3, 2, {1, 1, 1, 0, 0}},    // dim 5
    {4, 1, {1, 1, 3, 3, 0}},    // dim 6
    {4, 4, {1, 3, 5, 13, 0}},   // dim 7
    {5, 2, {1, 1, 5, 5, 17}},   // dim 8
};

constexpr int kBits = 32;

}  // namespace

SobolSequence::SobolSequence(int dim, std::uint64_t shift_seed) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw PreconditionViolated("SobolSequence: dim must be in [1, " + std::to_string(kMaxDim) +
                               "], got " + std::to_string(dim));
  }
  direction_.assign(dim_, std::vector<std::uint32_t>(kBits, 0));

  // dimension 1: v_j = 2^{32-j}
  for (int j = 0; j < kBits; ++j) direction_[0][j] = 1u << (kBits - 1 - j);

  for (int d = 1; d < dim_; ++d) {
    const JoeKuoRow& row = kJoeKuo[d - 1];
    const int s = row.s;
    std::vector<std::uint32_t> m(kBits);
    for (int j = 0; j < s; ++j) m[j] = row.m[j];
    for (int j = s; j < kBits; ++j) {
      // recurrence m_j = 2 a_1 m_{j-1} ^ 4 a_2 m_{j-2} ^ ... ^ 2^s m_{j-s} ^ m_{j-s}
      std::uint32_t mj = m[j - s] ^ (m[j - s] << s);
      for (int k = 1; k < s; ++k) {
        if ((row.a >> (s - 1 - k)) & 1u) mj ^= m[j - k] << k;
      }
      m[j] = mj;
    }
    for (int j = 0; j < kBits; ++j) direction_[d][j] = m[j] << (kBits - 1 - j);
  }

  shift_.assign(dim_, 0);
  if (shift_seed != 0) {
    CounterRng rng = CounterRng::stream(shift_seed, "qmc.digital-shift", 0);
    for (int d = 0; d < dim_; ++d) shift_[d] = static_cast<std::uint32_t>(rng.next_u64() >> 32);
  }
}

void SobolSequence::point(std::uint64_t i, double* out) const {
  // Gray-code formulation evaluated directly at index i: XOR the direction
  // numbers at the set bits of gray(i).
  const std::uint64_t g = i ^ (i >> 1);
  for (int d = 0; d < dim_; ++d) {
    std::uint32_t x = shift_[d];
    for (int j = 0; j < kBits; ++j) {
      if ((g >> j) & 1ULL) x ^= direction_[d][j];
    }
    // map to (0,1); the +0.5 ulp offset keeps 0 out of the range
    out[d] = (static_cast<double>(x) + 0.5) * 0x1.0p-32;
  }
}

double inverse_normal_cdf(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("inverse_normal_cdf: u must be in (0,1)");
  // Acklam's rational approximation
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (u < plow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - plow) {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // one Halley refinement against the actual CDF
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - u;
  const double t = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * x * x);
  x -= t / (1.0 + 0.5 * x * t);
  return x;
}

}  // namespace laplace_kit
