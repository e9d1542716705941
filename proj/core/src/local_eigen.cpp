#include "biotms/local_eigen.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace biotms {

EigenPairs dense_generalized_eigen(const Mat& stiffness, const Mat& mass) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(stiffness, mass, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw SolverError("dense_generalized_eigen: decomposition failed");
  // The reduction through the Cholesky factor of an ill-conditioned mass
  // leaves the vectors only approximately mass-orthonormal; one triangular
  // correction (Gram-Schmidt in the mass inner product) restores it.
  Mat vectors = es.eigenvectors();
  const Mat gram = vectors.transpose() * mass * vectors;
  Eigen::LLT<Mat> llt(0.5 * (gram + gram.transpose()));
  if (llt.info() == Eigen::Success) vectors = llt.matrixU().solve<Eigen::OnTheRight>(vectors);
  return {es.eigenvalues(), vectors};
}

namespace {

// Mass-orthonormalizes the columns of Y by classical Gram-Schmidt applied
// twice per column. Columns that vanish against the ones before them are
// dropped. Unlike a Gram-matrix factorization this does not square the
// conditioning, which matters after shift-invert has amplified the rigid
// modes by many orders of magnitude.
Mat mass_orthonormalize(const Mat& Y, const SpMat& mass) {
  Mat Q(Y.rows(), Y.cols());
  Mat MQ(Y.rows(), Y.cols());
  int kept = 0;
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    Vec v = Y.col(j);
    Vec Mv = mass * v;
    const double original = std::sqrt(std::max(0.0, v.dot(Mv)));
    if (!(original > 0.0)) continue;
    for (int pass = 0; pass < 2 && kept > 0; ++pass) {
      const Vec c = MQ.leftCols(kept).transpose() * v;
      v -= Q.leftCols(kept) * c;
      Mv = mass * v;
    }
    const double norm = std::sqrt(std::max(0.0, v.dot(Mv)));
    if (norm <= 1e-12 * original) continue;
    Q.col(kept) = v / norm;
    MQ.col(kept) = Mv / norm;
    ++kept;
  }
  return Q.leftCols(kept);
}

}  // namespace

EigenPairs smallest_eigenpairs(const SpMat& stiffness, const SpMat& mass, int count, const EigenOptions& opt) {
  const int dim = static_cast<int>(stiffness.rows());
  if (stiffness.cols() != dim || mass.rows() != dim || mass.cols() != dim) {
    throw InvalidInput("smallest_eigenpairs: matrix sizes differ");
  }
  if (count < 1 || count > dim) throw InvalidInput("smallest_eigenpairs: requested count out of range");

  const int block = std::min(dim, std::max(2 * count, count + 10));
  if (dim <= opt.dense_limit || 2 * block > dim) {
    EigenPairs all = dense_generalized_eigen(Mat(stiffness), Mat(mass));
    return {all.values.head(count), all.vectors.leftCols(count)};
  }

  // Shift keeps the factorized operator definite when the stiffness has a
  // null space (rigid modes); it is tiny against the spectrum.
  const double scale = stiffness.diagonal().sum() / mass.diagonal().sum();
  const double sigma = 1e-6 * scale;
  Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> llt(stiffness + sigma * mass);
  if (llt.info() != Eigen::Success) throw SolverError("smallest_eigenpairs: shifted factorization failed");

  std::mt19937_64 rng(opt.seed);
  Mat X(dim, block);
  for (int j = 0; j < block; ++j)
    for (int i = 0; i < dim; ++i) X(i, j) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  X = mass_orthonormalize(X, mass);

  Vec values;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Mat Y = mass_orthonormalize(llt.solve(mass * X), mass);
    Mat Kr = Y.transpose() * (stiffness * Y);
    Kr = 0.5 * (Kr + Kr.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(Kr);
    if (es.info() != Eigen::Success) throw SolverError("smallest_eigenpairs: Rayleigh-Ritz failed");
    X = Y * es.eigenvectors();
    values = es.eigenvalues();
    if (X.cols() < count) throw SolverError("smallest_eigenpairs: iteration block lost rank");

    const Mat KX = stiffness * X.leftCols(count);
    const Mat MX = mass * X.leftCols(count);
    const double ref = std::max(std::abs(values[X.cols() - 1]), scale * 1e-12);
    bool converged = true;
    for (int k = 0; k < count && converged; ++k) {
      const double res = (KX.col(k) - values[k] * MX.col(k)).norm();
      converged = res <= opt.tolerance * ref * MX.col(k).norm();
    }
    if (converged) return {values.head(count), X.leftCols(count)};
  }
  throw SolverError("smallest_eigenpairs: subspace iteration did not converge");
}

}  // namespace biotms
