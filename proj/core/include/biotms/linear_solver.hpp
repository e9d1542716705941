#pragma once

#include <Eigen/SparseCholesky>

#include "biotms/types.hpp"

namespace biotms {

/// Sparse LDL^T for symmetric systems whose diagonal blocks are definite
/// with known signs (SPD, or quasi-definite saddle points [P 0; 0 -N]).
///
/// If the factorization shows vanishing pivots (rank-deficient bases, e.g.
/// linearly dependent multiscale columns), the matrix is refactored with a
/// relative diagonal shift of `shift` in the direction of `block_signs`, and
/// every solve is followed by iterative refinement against the unshifted
/// matrix. For consistent singular systems this converges to a solution whose
/// prolongation is accurate even though the coefficients are not unique.
class SymmetricSolver {
 public:
  SymmetricSolver() = default;
  /// `block_signs[i]` is +1 for rows of positive definite blocks, -1 otherwise.
  SymmetricSolver(const SpMat& matrix, std::vector<signed char> block_signs);

  void factorize(const SpMat& matrix, std::vector<signed char> block_signs);

  /// Solves to a relative residual of `tolerance` (refinement up to
  /// `max_refinements` steps). Throws SolverError on breakdown.
  [[nodiscard]] Vec solve(const Vec& rhs) const;

  [[nodiscard]] bool shifted() const { return shifted_; }
  [[nodiscard]] double last_relative_residual() const { return last_residual_; }
  [[nodiscard]] int size() const { return static_cast<int>(matrix_.rows()); }

  static constexpr double tolerance = 1e-10;
  static constexpr double breakdown = 1e-6;
  static constexpr double shift = 1e-12;
  static constexpr int max_refinements = 30;

 private:
  SpMat matrix_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  bool shifted_ = false;
  mutable double last_residual_ = 0.0;
};

/// Columns of the identity selecting the entries with mask == 1.
SpMat selection_matrix(const DofMask& mask);

}  // namespace biotms
