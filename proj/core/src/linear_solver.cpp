#include "biotms/linear_solver.hpp"

#include <cmath>
#include <sstream>

namespace biotms {

SymmetricSolver::SymmetricSolver(const SpMat& matrix, std::vector<signed char> block_signs) {
  factorize(matrix, std::move(block_signs));
}

void SymmetricSolver::factorize(const SpMat& matrix, std::vector<signed char> block_signs) {
  if (matrix.rows() != matrix.cols()) throw InvalidInput("SymmetricSolver: matrix must be square");
  if (static_cast<Eigen::Index>(block_signs.size()) != matrix.rows()) {
    throw InvalidInput("SymmetricSolver: sign vector length mismatch");
  }
  matrix_ = matrix;
  shifted_ = false;
  if (matrix_.rows() == 0) return;

  ldlt_.compute(matrix_);
  bool ok = ldlt_.info() == Eigen::Success;
  if (ok) {
    const Vec& d = ldlt_.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    ok = std::isfinite(dmax) && dmax > 0.0 && d.cwiseAbs().minCoeff() > 1e-13 * dmax;
  }
  if (ok) return;

  Vec diag = matrix_.diagonal().cwiseAbs();
  const double scale = diag.maxCoeff() > 0.0 ? diag.maxCoeff() : 1.0;
  SpMat shifted = matrix_;
  for (Eigen::Index i = 0; i < shifted.rows(); ++i) {
    const double base = diag[i] > 0.0 ? diag[i] : scale;
    shifted.coeffRef(i, i) += block_signs[static_cast<std::size_t>(i)] * shift * base;
  }
  ldlt_.compute(shifted);
  if (ldlt_.info() != Eigen::Success) throw SolverError("SymmetricSolver: factorization failed after diagonal shift");
  shifted_ = true;
}

Vec SymmetricSolver::solve(const Vec& rhs) const {
  if (rhs.size() != matrix_.rows()) throw InvalidInput("SymmetricSolver: right-hand side length mismatch");
  if (rhs.size() == 0) return Vec();
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    last_residual_ = 0.0;
    return Vec::Zero(rhs.size());
  }
  Vec x = ldlt_.solve(rhs);
  Vec r = rhs - matrix_ * x;
  double rel = r.norm() / bnorm;
  // The unshifted factorization is exact up to rounding; two refinement
  // sweeps recover the last digits lost to pivot growth.
  const int sweeps = shifted_ ? max_refinements : 2;
  for (int it = 0; it < sweeps && rel > 1e-15; ++it) {
    const Vec dx = ldlt_.solve(r);
    Vec x_new = x + dx;
    Vec r_new = rhs - matrix_ * x_new;
    const double rel_new = r_new.norm() / bnorm;
    if (!(rel_new < rel)) break;
    x = std::move(x_new);
    r = std::move(r_new);
    rel = rel_new;
    if (!shifted_ && rel <= tolerance * 1e-3) break;
  }
  last_residual_ = rel;
  if (!x.allFinite() || !(rel <= breakdown)) {
    std::ostringstream msg;
    msg << "SymmetricSolver: solve did not converge (relative residual " << rel << ")";
    throw SolverError(msg.str());
  }
  return x;
}

SpMat selection_matrix(const DofMask& mask) {
  std::vector<Triplet> trips;
  int col = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) trips.emplace_back(static_cast<int>(i), col++, 1.0);
  }
  SpMat S(static_cast<Eigen::Index>(mask.size()), col);
  S.setFromTriplets(trips.begin(), trips.end());
  return S;
}

}  // namespace biotms
