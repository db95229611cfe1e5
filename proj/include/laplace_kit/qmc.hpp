#pragma once

#include <cstdint>
#include <vector>

namespace laplace_kit {

// Sobol low-discrepancy sequence (direction numbers from the standard
// Joe-Kuo table, first kMaxDim dimensions) with an optional digital shift
// so that different seeds give different, equally well-spread point sets.
class SobolSequence {
 public:
  static constexpr int kMaxDim = 8;

  // shift_seed == 0 means the raw (unshifted) sequence
  explicit SobolSequence(int dim, std::uint64_t shift_seed = 0);

  int dim() const { return dim_; }

  // i-th point of the sequence, components in (0, 1); evaluated directly
  // from the index, so points can be generated in any order
  void point(std::uint64_t i, double* out) const;

 private:
  int dim_;
  std::vector<std::uint32_t> shift_;                   // per-dimension digital shift
  std::vector<std::vector<std::uint32_t>> direction_;  // 32 direction numbers per dim
};

// Inverse of the standard normal CDF (Acklam's rational approximation with
// one Halley refinement step; relative error below 1e-13 on (0, 1)).
double inverse_normal_cdf(double u);

}  // namespace laplace_kit
