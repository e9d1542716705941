#include <gtest/gtest.h>

#include <random>

#include "biotms/diagnostics.hpp"
#include "fixtures.hpp"

using namespace biotms;

namespace {

struct Fixture {
  GridHierarchy grid{2, 8};
  PoroelasticMedium medium = testing_support::random_medium(8, 1e3, 4);
  OperatorSet ops = assemble_operators(build_spaces(grid, BoundarySpec::flux_free()), medium);
  ErrorNorms norms = build_error_norms(grid, medium, ops.A);

  SystemState random_state(unsigned seed) const {
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal;
    SystemState s{Vec(ops.num_displacement()), Vec(ops.num_velocity()), Vec(ops.num_pressure())};
    for (Vec* v : {&s.u, &s.g, &s.p})
      for (auto& x : *v) x = normal(rng);
    return s;
  }
};

}  // namespace

TEST(Diagnostics, IdenticalStatesGiveZero) {
  const Fixture f;
  const auto s = f.random_state(1);
  const auto r = compute_errors(s, s, f.norms);
  EXPECT_EQ(r.e_l2_u, 0.0);
  EXPECT_EQ(r.e_a_u, 0.0);
  EXPECT_EQ(r.e_l2_p, 0.0);
  EXPECT_EQ(r.e_l2_g, 0.0);
}

TEST(Diagnostics, ScaleInvariance) {
  const Fixture f;
  const auto a = f.random_state(1), b = f.random_state(2);
  const SystemState a2{2 * a.u, 2 * a.g, 2 * a.p}, b2{2 * b.u, 2 * b.g, 2 * b.p};
  const auto r1 = compute_errors(a, b, f.norms), r2 = compute_errors(a2, b2, f.norms);
  EXPECT_NEAR(r1.e_l2_u, r2.e_l2_u, 1e-14);
  EXPECT_NEAR(r1.e_a_u, r2.e_a_u, 1e-14);
  EXPECT_NEAR(r1.e_l2_p, r2.e_l2_p, 1e-14);
  EXPECT_NEAR(r1.e_l2_g, r2.e_l2_g, 1e-14);
}

TEST(Diagnostics, NormsMatchDenseIntegration) {
  const Fixture f;
  const auto co = testing_support::coefficients(f.medium);
  const auto dense = oracle::assemble(8, co);
  const Mat mass = oracle::displacement_mass(8, [](int) { return 1.0; });
  const auto ref = f.random_state(3);
  SystemState cand = ref;
  cand.u += 0.1 * f.random_state(4).u;
  cand.p += 0.1 * f.random_state(5).p;
  const auto r = compute_errors(cand, ref, f.norms);
  const Vec du = cand.u - ref.u;
  EXPECT_NEAR(r.e_l2_u, std::sqrt(du.dot(mass * du) / ref.u.dot(mass * ref.u)), 1e-12);
  EXPECT_NEAR(r.e_a_u, std::sqrt(du.dot(dense.A * du) / ref.u.dot(dense.A * ref.u)), 1e-12);
  EXPECT_NEAR(r.e_l2_p, (cand.p - ref.p).norm() / ref.p.norm(), 1e-12);
  EXPECT_EQ(r.e_l2_g, 0.0);

  // Velocity weight (kappa/nu)^2: a uniform flow through a cell of kappa k
  // is weighted by k^2 relative to the unit-kappa J.
  const auto energy = build_error_norms(f.grid, f.medium, f.ops.A, VelocityWeight::Energy);
  EXPECT_LT((Mat(energy.velocity_mass) - dense.J).cwiseAbs().maxCoeff(), 1e-12 * dense.J.cwiseAbs().maxCoeff());
  oracle::Coefficients squared = co;
  squared.kappa = [&](int c) { return 1.0 / std::pow(co.kappa(c), 2); };
  const auto weighted = oracle::assemble(8, squared);
  EXPECT_LT((Mat(f.norms.velocity_mass) - weighted.J).cwiseAbs().maxCoeff(), 1e-12 * weighted.J.cwiseAbs().maxCoeff());
}

TEST(Diagnostics, ZeroReferenceConvention) {
  const Fixture f;
  SystemState zero{Vec::Zero(f.ops.num_displacement()), Vec::Zero(f.ops.num_velocity()), Vec::Zero(f.ops.num_pressure())};
  const auto r = compute_errors(zero, zero, f.norms);
  EXPECT_EQ(r.e_l2_u + r.e_a_u + r.e_l2_p + r.e_l2_g, 0.0);
  EXPECT_THROW(compute_errors(f.random_state(1), zero, f.norms), InvalidInput);
  SystemState short_state = zero;
  short_state.p = Vec::Zero(3);
  EXPECT_THROW(compute_errors(short_state, zero, f.norms), InvalidInput);
}

TEST(Diagnostics, CsvFormat) {
  ErrorReport r;
  r.e_l2_u = 0.0253;
  r.e_a_u = 0.22671234;
  r.e_l2_p = 0.027;
  r.e_l2_g = 1.0 / 3.0;
  r.meta = {10, 200, 20, 2, 10, Scheme::FixedStress, "kappa1"};
  EXPECT_EQ(csv_header(), "N,n,Ju,Jg,Jt,scheme,field,e_l2_u,e_a_u,e_l2_p,e_l2_g");
  EXPECT_EQ(csv_row(r), "10,200,20,2,10,fixed_stress,kappa1,0.0253,0.226712,0.027,0.333333");
}
