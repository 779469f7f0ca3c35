#pragma once

#include <cstdint>

#include "carleman/types.hpp"

namespace carleman {

enum class SvdMethod { Auto, Dense, InverseIteration };

struct SingularValueOptions {
  SvdMethod method = SvdMethod::Auto;
  int dense_limit = 1500;     // Auto uses the dense SVD up to this many columns
  double tolerance = 1e-10;   // relative change of sigma between iterations
  int max_iterations = 500;
  std::uint64_t seed = 1;
};

struct SingularValueResult {
  double sigma_min = 0;
  SvdMethod method = SvdMethod::Dense;
  int iterations = 0;
};

/// min ||A x|| / ||x|| over nonzero x. Dense: BDCSVD. Inverse iteration:
/// sparse QR of A, then power iteration on (A^* A)^{-1}. Throws
/// ConvergenceError if the iteration does not settle.
SingularValueResult min_singular_value(const SparseMatrixc& a, const SingularValueOptions& opt = {});

}  // namespace carleman
