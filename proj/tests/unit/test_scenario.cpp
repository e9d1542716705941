#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "biotms/scenario.hpp"

using namespace biotms;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("biotms_scenario_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

ScenarioConfig smoke(Model model) {
  ScenarioConfig cfg;
  cfg.model = model;
  cfg.N = 4;
  cfg.n = 16;
  cfg.Ju = 8;
  cfg.Jg = 2;
  cfg.Jt = 5;
  return cfg;
}

}  // namespace

TEST(Scenario, ParseConfig) {
  const auto cfg = parse_config(
      "# headline run\n"
      "model = model2\n"
      "N = 8   # coarse\n"
      "n=64\n"
      "scheme = fully_coupled\n"
      "velocity_weight = energy\n"
      "sweep.Ju = 4, 8,16\n");
  EXPECT_EQ(cfg.model, Model::PressureFixed);
  EXPECT_EQ(cfg.N, 8);
  EXPECT_EQ(cfg.n, 64);
  EXPECT_EQ(cfg.Ju, 20);
  EXPECT_EQ(cfg.scheme, Scheme::FullyCoupled);
  EXPECT_EQ(cfg.velocity_weight, VelocityWeight::Energy);
  EXPECT_EQ(cfg.sweeps.at("Ju"), "4, 8,16");
  EXPECT_EQ(parse_config(cfg.to_text()).to_text(), cfg.to_text());
}

TEST(Scenario, ConfigRejections) {
  EXPECT_THROW(parse_config("Nx = 4\n"), InvalidInput);
  EXPECT_THROW(parse_config("N 4\n"), InvalidInput);
  EXPECT_THROW(parse_config("N = four\n"), InvalidInput);
  EXPECT_THROW(parse_config("N = 4.5\n"), InvalidInput);
  EXPECT_THROW(parse_config("model = model3\n"), InvalidInput);
  EXPECT_THROW(parse_config("sweep.bogus = 1,2\n"), InvalidInput);
  EXPECT_THROW(parse_config("N = 3\nn = 200\n").validate(), InvalidInput);
  EXPECT_THROW(parse_config("spectral_problem = 3\n").validate(), InvalidInput);
  EXPECT_THROW(load_config("/nonexistent/biotms.cfg"), InvalidInput);
}

TEST(Scenario, SweepExpansionOrder) {
  ScenarioConfig cfg;
  cfg.set("sweep.Ju", "4,8");
  cfg.set("sweep.Jg", "2,3,4");
  const auto points = expand_sweep(cfg);
  ASSERT_EQ(points.size(), 6u);
  // Keys in order (Jg before Ju), last key fastest.
  EXPECT_EQ(points[0].Jg, 2);
  EXPECT_EQ(points[0].Ju, 4);
  EXPECT_EQ(points[1].Ju, 8);
  EXPECT_EQ(points[2].Jg, 3);
  for (const auto& p : points) EXPECT_TRUE(p.sweeps.empty());
}

TEST(Scenario, ModelData) {
  const GridHierarchy grid(10, 20);
  const Vec f1 = assemble_load(grid, model_source(Model::FluxFree, 10), 0.0);
  const double h2 = 1.0 / 400.0;
  EXPECT_DOUBLE_EQ(f1[grid.fine_cell(0, 0)], 2.0 * h2);
  EXPECT_DOUBLE_EQ(f1[grid.fine_cell(1, 1)], 2.0 * h2);
  EXPECT_DOUBLE_EQ(f1[grid.fine_cell(19, 18)], -2.0 * h2);
  EXPECT_EQ(f1[grid.fine_cell(2, 0)], 0.0);
  EXPECT_NEAR(f1.sum(), 0.0, 1e-18);
  const Vec f2 = assemble_load(grid, model_source(Model::PressureFixed, 10), 0.0);
  EXPECT_LT((f2.array() - h2).abs().maxCoeff(), 1e-18);
  const Vec p0 = initial_pressure(grid);
  EXPECT_DOUBLE_EQ(p0[grid.fine_cell(0, 0)], 0.025 * 0.025 * 0.975 * 0.975);
  EXPECT_EQ(initial_pressure(grid, 0.0).norm(), 0.0);
}

TEST(Scenario, FieldDumpsRoundTrip) {
  const GridHierarchy grid(2, 4);
  Vec p = Vec::LinSpaced(16, 0.1, 1.7);
  const auto dir = scratch("dump");
  std::filesystem::create_directories(dir);
  save_field(pressure_field(grid, p), dir / "p.txt");
  const auto back = load_field(dir / "p.txt", false);
  EXPECT_EQ(Vec::Map(back.values.data(), 16), p);
  save_field(pressure_field(grid, Vec::Zero(16)), dir / "zero.txt");
  const auto zero = load_field(dir / "zero.txt", false);
  for (const double v : zero.values) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(displacement_field(grid, Vec::Zero(50), 2), InvalidInput);
  std::filesystem::remove_all(dir);
}

TEST(Scenario, SmokeRunConservesAndWritesOutputs) {
  for (const Model model : {Model::FluxFree, Model::PressureFixed}) {
    ScenarioConfig cfg = smoke(model);
    cfg.output = scratch(to_string(model)).string();
    const PointResult r = run_scenario(cfg);
    EXPECT_TRUE(r.conservation.conserved()) << r.conservation.max_residual;
    EXPECT_EQ(r.conservation.residuals.size(), 5u);
    EXPECT_GT(r.errors.e_l2_p, 0.0);
    EXPECT_LT(r.errors.e_l2_p, 0.5);
    for (const char* file : {"config.txt", "errors.csv", "conservation.csv", "ms_pressure.txt", "ref_pressure.txt",
                             "ms_ux.txt", "ref_uy.txt", "ms_velocity.txt", "kappa.txt"}) {
      EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(cfg.output) / file)) << file;
    }
    const auto saved = load_config(std::filesystem::path(cfg.output) / "config.txt");
    EXPECT_EQ(saved.to_text(), cfg.to_text());
    const auto pressure = load_field(std::filesystem::path(cfg.output) / "ref_pressure.txt", false);
    EXPECT_EQ(Vec::Map(pressure.values.data(), 256), r.reference.p);
    if (model == Model::PressureFixed) {
      // Source-driven pressure with p = 0 on the boundary peaks inside.
      const GridHierarchy grid(4, 16);
      EXPECT_GT(r.reference.p[grid.fine_cell(8, 8)], r.reference.p[grid.fine_cell(0, 8)]);
      EXPECT_GT(r.reference.p[grid.fine_cell(0, 8)], 0.0);
    }
    std::filesystem::remove_all(cfg.output);
  }
}

TEST(Scenario, SweepSharesContextsAndWritesCombinedCsv) {
  ScenarioConfig cfg = smoke(Model::FluxFree);
  cfg.output = scratch("sweep").string();
  cfg.set("sweep.Ju", "4,8");
  cfg.set("sweep.N", "2,4");
  const auto results = run_sweep(cfg, 2);
  ASSERT_EQ(results.size(), 4u);
  // Same point run on its own gives the same numbers.
  ScenarioConfig single = smoke(Model::FluxFree);
  single.N = 4;
  single.Ju = 8;
  single.output = scratch("single").string();
  const auto alone = run_scenario(single);
  EXPECT_NEAR(results[3].errors.e_l2_u, alone.errors.e_l2_u, 1e-10);
  EXPECT_NEAR(results[3].errors.e_l2_p, alone.errors.e_l2_p, 1e-10);
  std::ifstream csv(std::filesystem::path(cfg.output) / "errors.csv");
  int lines = 0;
  for (std::string line; std::getline(csv, line);) ++lines;
  EXPECT_EQ(lines, 5);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(cfg.output) / "point_3" / "errors.csv"));
  std::filesystem::remove_all(cfg.output);
  std::filesystem::remove_all(single.output);
}

TEST(Scenario, FieldFileInput) {
  const auto dir = scratch("field");
  std::filesystem::create_directories(dir);
  ScalarField kappa{16, 16, std::vector<double>(256, 1.0)};
  for (int k = 0; k < 16; ++k) kappa.values[static_cast<std::size_t>(5 * 16 + k)] = 1e4;
  save_field(kappa, dir / "stripe.txt");
  ScenarioConfig cfg = smoke(Model::FluxFree);
  cfg.field = (dir / "stripe.txt").string();
  EXPECT_EQ(build_permeability(cfg).values, kappa.values);
  EXPECT_EQ(cfg.field_id(), "stripe.txt");
  cfg.n = 32;
  EXPECT_THROW(build_permeability(cfg), InvalidInput);
  std::filesystem::remove_all(dir);
}

TEST(Scenario, PassesCheck) {
  PointResult r;
  r.conservation.threshold = 1e-9;
  r.errors.e_l2_p = 0.05;
  r.errors.e_l2_u = 0.05;
  std::string why;
  EXPECT_TRUE(passes_check(r, &why));
  r.errors.e_l2_u = 0.2;
  EXPECT_FALSE(passes_check(r, &why));
  EXPECT_NE(why.find("displacement"), std::string::npos);
}
