#include <gtest/gtest.h>

#include "biotms/displacement_offline.hpp"
#include "fixtures.hpp"

using namespace biotms;

TEST(DisplacementOffline, LocalDimensions) {
  const GridHierarchy grid(3, 6);
  EXPECT_EQ(local_displacement_dim(grid, grid.coarse_vertex(1, 1)), 2 * 25);
  EXPECT_EQ(local_displacement_dim(grid, grid.coarse_vertex(0, 0)), 2 * 9);
  EXPECT_EQ(local_displacement_dim(grid, grid.coarse_vertex(1, 0)), 2 * 15);
}

TEST(DisplacementOffline, EigenproblemMatchesDenseOracle) {
  const GridHierarchy grid(2, 2);
  const auto medium = testing_support::uniform_medium(2);
  const int vertex = grid.coarse_vertex(1, 1);  // neighborhood is the whole grid
  const auto pairs = local_displacement_eig(grid, medium, vertex, 18);
  const auto co = testing_support::coefficients(medium);
  const auto dense = oracle::assemble(2, co);
  const Mat mass = oracle::displacement_mass(2, [&](int c) { return co.lambda(c) + 2 * co.mu(c); });
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ref(dense.A, mass);
  EXPECT_LT((pairs.values - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-10 * ref.eigenvalues().maxCoeff());
  EXPECT_LT((pairs.vectors.transpose() * mass * pairs.vectors - Mat::Identity(18, 18)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DisplacementOffline, RigidModesAndOrdering) {
  const GridHierarchy grid(4, 16);
  const auto medium = testing_support::random_medium(16, 1e4, 8);
  for (const int vertex : {0, grid.coarse_vertex(2, 0), grid.coarse_vertex(2, 2)}) {
    const auto pairs = local_displacement_eig(grid, medium, vertex, 10);
    const double scale = pairs.values.maxCoeff();
    int zeros = 0;
    for (int k = 0; k < 10; ++k) {
      EXPECT_GE(pairs.values[k], -1e-9 * scale);
      if (k > 0) EXPECT_LE(pairs.values[k - 1], pairs.values[k]);
      if (std::abs(pairs.values[k]) <= 1e-9 * scale) ++zeros;
    }
    EXPECT_GE(zeros, 2);
  }
  EXPECT_THROW(local_displacement_eig(grid, medium, 0, 51), InvalidInput);
}

TEST(DisplacementOffline, PartitionOfUnity) {
  const GridHierarchy grid(4, 16);
  const auto medium = testing_support::random_medium(16, 1e4, 12);
  const auto pous = build_all_pou(grid, medium);
  Vec s11 = Vec::Zero(grid.num_fine_nodes()), s12 = s11, s21 = s11, s22 = s11;
  double off_diagonal = 0.0;
  for (const auto& pou : pous) {
    for (int k = 0; k < pou.nodes.size(); ++k) {
      const int g = pou.nodes.global(k);
      s11[g] += pou.xi11[k];
      s12[g] += pou.xi12[k];
      s21[g] += pou.xi21[k];
      s22[g] += pou.xi22[k];
    }
    off_diagonal = std::max(off_diagonal, pou.xi12.cwiseAbs().maxCoeff());
    // Interpolates the hat at coarse vertices.
    for (int v = 0; v < grid.num_coarse_vertices(); ++v) {
      const auto ij = grid.coarse_vertex_ij(v);
      const int node = grid.fine_node(ij[0] * grid.ratio(), ij[1] * grid.ratio());
      if (!pou.nodes.contains(node)) continue;
      EXPECT_NEAR(pou.xi11[pou.nodes.local(node)], v == pou.vertex ? 1.0 : 0.0, 1e-12);
      EXPECT_NEAR(pou.xi22[pou.nodes.local(node)], v == pou.vertex ? 1.0 : 0.0, 1e-12);
    }
  }
  EXPECT_LT((s11.array() - 1.0).abs().maxCoeff(), 1e-9);
  EXPECT_LT(s12.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(s21.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((s22.array() - 1.0).abs().maxCoeff(), 1e-9);
  EXPECT_GT(off_diagonal, 1e-6);

  const auto single = build_pou(grid, medium, 7);
  EXPECT_LT((single.xi11 - pous[7].xi11).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DisplacementOffline, MultiplyBasis) {
  const GridHierarchy grid(4, 8);
  const auto medium = testing_support::random_medium(8, 100.0, 1);
  const auto pou = build_pou(grid, medium, grid.coarse_vertex(1, 2));
  const int nn = pou.nodes.size();
  Mat fields(2 * nn, 2);
  fields.col(0).setOnes();
  for (int k = 0; k < 2 * nn; ++k) fields(k, 1) = std::sin(0.3 * k) + 0.1 * k;
  const Mat out = multiply_basis(pou, fields);
  for (int k = 0; k < nn; ++k) {
    EXPECT_EQ(out(2 * k, 0), pou.xi11[k]);
    EXPECT_EQ(out(2 * k + 1, 0), pou.xi22[k]);
    EXPECT_DOUBLE_EQ(out(2 * k, 1), pou.xi11[k] * fields(2 * k, 1));
    EXPECT_DOUBLE_EQ(out(2 * k + 1, 1), pou.xi22[k] * fields(2 * k + 1, 1));
    // Vanishes on the neighborhood boundary.
    const auto ij = grid.fine_node_ij(pou.nodes.global(k));
    const bool on_boundary = ij[0] == 0 || ij[0] == 4 || ij[1] == 2 || ij[1] == 6;
    if (on_boundary) EXPECT_EQ(out.row(2 * k).cwiseAbs().maxCoeff() + out.row(2 * k + 1).cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_THROW(multiply_basis(pou, Mat::Ones(3, 1)), InvalidInput);
}

TEST(DisplacementOffline, ProlongationCounts) {
  const GridHierarchy grid(10, 20);
  const auto medium = testing_support::random_medium(20, 1e4, 2);
  const auto basis = build_displacement_basis(grid, medium, 20);
  const auto R = assemble_displacement_prolongation(grid, basis);
  int expected_columns = 0;
  for (int v = 0; v < grid.num_coarse_vertices(); ++v) {
    expected_columns += std::min(20, local_displacement_dim(grid, v));  // corners hold 18
  }
  EXPECT_EQ(R.num_columns(), expected_columns);
  int free = 0;
  for (const char f : R.column_free) free += f;
  EXPECT_EQ(free, 1620);
  const Mat dense(R.R);
  for (int v = 0; v < grid.num_fine_nodes(); ++v) {
    if (!grid.is_boundary_fine_node(v)) continue;
    for (int col = 0; col < R.num_columns(); ++col) {
      if (!R.column_free[col]) continue;
      EXPECT_EQ(dense(2 * v, col), 0.0);
      EXPECT_EQ(dense(2 * v + 1, col), 0.0);
    }
  }
}

TEST(DisplacementOffline, RetentionIsCappedAtTheLocalDimension) {
  const GridHierarchy grid(2, 2);
  const auto medium = testing_support::uniform_medium(2);
  const auto pairs = all_displacement_eigenpairs(grid, medium, 100);
  for (int v = 0; v < grid.num_coarse_vertices(); ++v) {
    EXPECT_EQ(pairs[v].values.size(), local_displacement_dim(grid, v));
  }
  const auto basis = combine_displacement_basis(pairs, build_all_pou(grid, medium), 5);
  for (const auto& vb : basis.vertices) EXPECT_EQ(vb.fields.cols(), 5);
}

TEST(DisplacementOffline, CoarsePressure) {
  const GridHierarchy grid(10, 40);
  const auto space = build_coarse_pressure(grid);
  EXPECT_EQ(space.num_columns(), 100);
  const Vec counts = space.R.transpose() * Vec::Ones(grid.num_fine_cells());
  EXPECT_EQ((counts.array() - 16.0).abs().maxCoeff(), 0.0);
  const Mat gram = Mat(space.R.transpose() * space.R);
  EXPECT_EQ((gram - 16.0 * Mat::Identity(100, 100)).cwiseAbs().maxCoeff(), 0.0);

  Vec p(grid.num_fine_cells());
  for (int c = 0; c < p.size(); ++c) p[c] = grid.coarse_cell_of(c) * 2.0 + (c % 2 == 0 ? 0.5 : -0.5);
  const Vec avg = coarse_cell_average(grid, p);
  for (int K = 0; K < 100; ++K) EXPECT_NEAR(avg[K], 2.0 * K, 1e-12);
}
