#pragma once

#include <cstdint>

#include "biotms/types.hpp"

namespace biotms {

struct EigenPairs {
  Vec values;   ///< nondecreasing
  Mat vectors;  ///< columns, orthonormal in the mass inner product
};

struct EigenOptions {
  /// Problems up to this size use a dense solver.
  int dense_limit = 240;
  /// Relative residual target for the iterative solver.
  double tolerance = 1e-9;
  int max_iterations = 500;
  std::uint64_t seed = 0x5eed;
};

/// Smallest `count` eigenpairs of stiffness x = mu mass x, with stiffness
/// symmetric positive semidefinite and mass symmetric positive definite.
/// Large problems use shift-invert block subspace iteration with
/// Rayleigh-Ritz projection.
EigenPairs smallest_eigenpairs(const SpMat& stiffness, const SpMat& mass, int count, const EigenOptions& options = {});

/// Dense generalized symmetric-definite problem; all pairs, ascending.
EigenPairs dense_generalized_eigen(const Mat& stiffness, const Mat& mass);

}  // namespace biotms
