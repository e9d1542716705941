#include <gtest/gtest.h>

#include <random>

#include "biotms/fine_fem.hpp"
#include "biotms/local_eigen.hpp"
#include "fixtures.hpp"

using namespace biotms;

namespace {

// Stiffness/mass pair of the free elasticity problem on a whole grid.
std::pair<SpMat, SpMat> elasticity_pencil(int n, const PoroelasticMedium& m) {
  const GridHierarchy grid(2, n);
  const auto cells = all_fine_cells(grid);
  std::vector<double> w(m.lambda.size());
  for (std::size_t c = 0; c < w.size(); ++c) w[c] = m.lambda[c] + 2 * m.mu[c];
  return {assemble_elasticity(grid, cells, nullptr, m.lambda, m.mu),
          assemble_displacement_mass(grid, cells, nullptr, w)};
}

}  // namespace

TEST(LocalEigen, DenseSolverOnDiagonalPencil) {
  Mat K = Vec::LinSpaced(5, 4.0, 0.0).asDiagonal();
  Mat M = Mat::Identity(5, 5) * 2.0;
  const auto pairs = dense_generalized_eigen(K, M);
  EXPECT_NEAR(pairs.values[0], 0.0, 1e-15);
  EXPECT_NEAR(pairs.values[4], 2.0, 1e-14);
  EXPECT_LT((pairs.vectors.transpose() * M * pairs.vectors - Mat::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LocalEigen, SubspaceIterationMatchesDense) {
  const auto medium = testing_support::random_medium(12, 1e3, 2);
  const auto [K, M] = elasticity_pencil(12, medium);  // 338 unknowns, above the dense limit
  ASSERT_GT(K.rows(), EigenOptions{}.dense_limit);
  const auto iterative = smallest_eigenpairs(K, M, 12);
  const auto dense = dense_generalized_eigen(Mat(K), Mat(M));
  ASSERT_EQ(iterative.values.size(), 12);
  const double scale = dense.values[11];
  for (int k = 0; k < 12; ++k) EXPECT_NEAR(iterative.values[k], dense.values[k], 1e-8 * scale) << k;
  const Mat gram = iterative.vectors.transpose() * (M * iterative.vectors);
  EXPECT_LT((gram - Mat::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-8);
  for (int k = 0; k < 12; ++k) {
    const Vec r = K * iterative.vectors.col(k) - iterative.values[k] * (M * iterative.vectors.col(k));
    EXPECT_LT(r.norm(), 1e-7 * scale * (M * iterative.vectors.col(k)).norm() + 1e-12) << k;
  }
  // Three rigid motions of the free body.
  for (int k = 0; k < 3; ++k) EXPECT_LT(std::abs(iterative.values[k]), 1e-9 * scale);
  EXPECT_GT(iterative.values[3], 1e-6 * scale);
}

TEST(LocalEigen, RejectsBadArguments) {
  const auto [K, M] = elasticity_pencil(2, testing_support::uniform_medium(2));
  EXPECT_THROW(smallest_eigenpairs(K, M, 0), InvalidInput);
  EXPECT_THROW(smallest_eigenpairs(K, M, static_cast<int>(K.rows()) + 1), InvalidInput);
  EXPECT_THROW(smallest_eigenpairs(K, SpMat(3, 3), 1), InvalidInput);
}
