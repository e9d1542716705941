#include <gtest/gtest.h>

#include <random>

#include "biotms/fine_fem.hpp"
#include "fixtures.hpp"

using namespace biotms;
using testing_support::max_abs_diff;

namespace {

double relative_gap(const SpMat& a, const Mat& b) {
  return max_abs_diff(Mat(a), b) / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

}  // namespace

TEST(FineFem, OperatorsMatchDenseOracle) {
  const GridHierarchy grid(2, 4);
  const auto medium = testing_support::random_medium(4, 1e3, 11);
  const auto ops = assemble_operators(build_spaces(grid, BoundarySpec::flux_free()), medium);
  const auto dense = oracle::assemble(4, testing_support::coefficients(medium));
  EXPECT_LT(relative_gap(ops.A, dense.A), 1e-12);
  EXPECT_LT(relative_gap(ops.B, dense.B), 1e-12);
  EXPECT_LT(relative_gap(ops.C, dense.C), 1e-12);
  EXPECT_LT(relative_gap(ops.D, dense.D), 1e-12);
  EXPECT_LT(relative_gap(ops.E, dense.E), 1e-12);
  EXPECT_LT(relative_gap(ops.J, dense.J), 1e-12);
  EXPECT_LT(relative_gap(ops.K, dense.K), 1e-12);
}

TEST(FineFem, AdjointPairsAndSymmetry) {
  const GridHierarchy grid(2, 6);
  const auto ops = assemble_operators(build_spaces(grid, BoundarySpec::flux_free()), testing_support::random_medium(6));
  EXPECT_EQ((Mat(ops.C) - Mat(ops.B).transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((Mat(ops.K) - Mat(ops.E).transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT((Mat(ops.A) - Mat(ops.A).transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((Mat(ops.J) - Mat(ops.J).transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FineFem, ElementValues) {
  const GridHierarchy grid(2, 2);
  const double h = 0.5;
  const auto ops = assemble_operators(build_spaces(grid, BoundarySpec::flux_free()), testing_support::uniform_medium(2));
  const auto e = grid.fine_cell_edges(0);
  // Boundary edges belong to one cell only.
  EXPECT_NEAR(ops.J.coeff(e[0], e[0]), h * h / 3.0, 1e-15);
  EXPECT_NEAR(ops.J.coeff(e[0], e[1]), h * h / 6.0, 1e-15);
  EXPECT_NEAR(ops.J.coeff(e[2], e[3]), h * h / 6.0, 1e-15);
  EXPECT_EQ(ops.J.coeff(e[0], e[2]), 0.0);
  EXPECT_NEAR(ops.K.coeff(e[0], 0), -h, 1e-15);
  EXPECT_NEAR(ops.K.coeff(e[1], 0), h, 1e-15);

  ScalarField kappa{2, 2, {1.0, 1.0, 1.0, 5.0}};
  const auto m = build_medium(kappa, 0.2, biot_modulus_by_region(kappa, 1.0, 10.0), 0.9, 1.0);
  const auto ops2 = assemble_operators(build_spaces(grid, BoundarySpec::flux_free()), m);
  EXPECT_NEAR(ops2.D.coeff(3, 3), h * h / 10.0, 1e-16);
  EXPECT_NEAR(ops2.D.coeff(0, 0), h * h, 1e-16);
}

TEST(FineFem, BoundaryMasks) {
  const GridHierarchy grid(2, 4);
  const auto flux_free = build_spaces(grid, BoundarySpec::flux_free());
  const auto pressure = build_spaces(grid, BoundarySpec::pressure_fixed());
  for (int e = 0; e < grid.num_fine_edges(); ++e) {
    EXPECT_EQ(flux_free.velocity_free[e], grid.is_boundary_fine_edge(e) ? 0 : 1);
    EXPECT_EQ(pressure.velocity_free[e], 1);
  }
  for (int v = 0; v < grid.num_fine_nodes(); ++v) {
    for (const auto* s : {&flux_free, &pressure}) {
      EXPECT_EQ(s->displacement_free[2 * v], grid.is_boundary_fine_node(v) ? 0 : 1);
      EXPECT_EQ(s->displacement_free[2 * v + 1], grid.is_boundary_fine_node(v) ? 0 : 1);
    }
  }
  EXPECT_THROW((BoundarySpec{kLeft, kRight}.validate()), InvalidInput);
  EXPECT_THROW((BoundarySpec{kAllSides, kTop}.validate()), InvalidInput);
  EXPECT_NO_THROW((BoundarySpec{kLeft | kRight, kBottom | kTop}.validate()));
}

TEST(FineFem, Loads) {
  const GridHierarchy grid(4, 8);
  const double h2 = 1.0 / 64.0;
  const Vec ones = assemble_load(grid, [](Point, double) { return 1.0; }, 0.0);
  EXPECT_LT((ones.array() - h2).abs().maxCoeff(), 1e-18);
  EXPECT_EQ(assemble_load(grid, [](Point, double) { return 0.0; }, 0.0).norm(), 0.0);
  const Vec timed = assemble_load(grid, [](Point p, double t) { return p.x + t; }, 2.0);
  EXPECT_NEAR(timed[grid.fine_cell(3, 0)], (3.5 / 8.0 + 2.0) * h2, 1e-16);
}

TEST(FineFem, EnergyNorm) {
  const GridHierarchy grid(2, 4);
  const auto medium = testing_support::random_medium(4);
  const auto ops = assemble_operators(build_spaces(grid, BoundarySpec::flux_free()), medium);
  const int nu = ops.num_displacement();
  EXPECT_EQ(energy_norm(Vec::Zero(nu), ops.A), 0.0);
  Vec translation(nu);
  for (int k = 0; k < nu; ++k) translation[k] = k % 2 == 0 ? 0.3 : -1.7;

  std::mt19937 rng(3);
  std::normal_distribution<double> normal;
  Vec u(nu);
  for (auto& x : u) x = normal(rng);
  const auto dense = oracle::assemble(4, testing_support::coefficients(medium));
  const double expected = std::sqrt(u.dot(dense.A * u));
  // Rounding in u^T A u leaves a residue of order sqrt(eps) times the scale.
  EXPECT_LT(energy_norm(translation, ops.A), 1e-6 * expected);
  EXPECT_NEAR(energy_norm(u, ops.A), expected, 1e-12 * expected);
  EXPECT_THROW(energy_norm(Vec::Zero(3), ops.A), InvalidInput);
}
