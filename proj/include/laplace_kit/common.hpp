#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace laplace_kit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// --- error taxonomy ------------------------------------------------------

struct Error : std::runtime_error {
  std::string code;
  Error(std::string c, const std::string& what)
      : std::runtime_error(c + ": " + what), code(std::move(c)) {}
};

#define LAPLACE_KIT_ERROR(NAME)                                  \
  struct NAME : Error {                                          \
    explicit NAME(const std::string& what) : Error(#NAME, what) {} \
  }

LAPLACE_KIT_ERROR(DomainError);
LAPLACE_KIT_ERROR(DimensionMismatch);
LAPLACE_KIT_ERROR(StencilOutOfDomain);
LAPLACE_KIT_ERROR(SingularPrecision);
LAPLACE_KIT_ERROR(UnsupportedOrder);
LAPLACE_KIT_ERROR(OmegaTooLarge);
LAPLACE_KIT_ERROR(OmegaOutOfRange);
LAPLACE_KIT_ERROR(PreconditionViolated);
LAPLACE_KIT_ERROR(IndefiniteAtOptimum);
LAPLACE_KIT_ERROR(CurvatureSingular);
LAPLACE_KIT_ERROR(RankDeficientForwardMap);
LAPLACE_KIT_ERROR(AllDrawsRejected);
LAPLACE_KIT_ERROR(CenterOutsideX0);
LAPLACE_KIT_ERROR(BoxTooSmall);
LAPLACE_KIT_ERROR(ConfigError);
LAPLACE_KIT_ERROR(UnknownModel);

#undef LAPLACE_KIT_ERROR

// --- worker pool ----------------------------------------------------------
//
// Work is split into fixed-size chunks whose results land in caller-owned
// slots, so the combined output is identical for any worker count.

int thread_count();                 // from set_thread_count / LAPLACE_KIT_THREADS / 1
void set_thread_count(int n);       // n <= 0 resets to the environment default

// Runs fn(chunk_index) for chunk_index in [0, n_chunks). fn must only write
// to state owned by its chunk.
void parallel_chunks(std::int64_t n_chunks, const std::function<void(std::int64_t)>& fn);

// Deterministic pairwise sum, independent of how the terms were produced.
double pairwise_sum(const std::vector<double>& terms);
Vec pairwise_sum(const std::vector<Vec>& terms);

inline void require_dim(const Vec& v, Eigen::Index d, const char* what) {
  if (v.size() != d) {
    throw DimensionMismatch(std::string(what) + ": got " + std::to_string(v.size()) +
                            ", expected " + std::to_string(d));
  }
}

}  // namespace laplace_kit
