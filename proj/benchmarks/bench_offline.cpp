#include <benchmark/benchmark.h>

#include "biotms/scenario.hpp"

using namespace biotms;

namespace {

PoroelasticMedium medium_for(int n) {
  const auto kappa = generate_high_contrast(n, FieldPattern::Channels, 1e4, 1);
  return build_medium(kappa, 0.2, biot_modulus_by_region(kappa, 1.0, 10.0), 0.9, 1.0);
}

void BM_AssembleOperators(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto medium = medium_for(n);
  const auto spaces = build_spaces(GridHierarchy(10, n), BoundarySpec::flux_free());
  for (auto _ : state) benchmark::DoNotOptimize(assemble_operators(spaces, medium));
}
BENCHMARK(BM_AssembleOperators)->Arg(80)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Snapshots(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto medium = medium_for(n);
  const GridHierarchy grid(10, n);
  for (auto _ : state) benchmark::DoNotOptimize(build_snapshot_space(grid, medium));
}
BENCHMARK(BM_Snapshots)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_PartitionOfUnity(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto medium = medium_for(n);
  const GridHierarchy grid(10, n);
  for (auto _ : state) benchmark::DoNotOptimize(build_all_pou(grid, medium));
}
BENCHMARK(BM_PartitionOfUnity)->Arg(80)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_DisplacementEigen(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto medium = medium_for(n);
  const GridHierarchy grid(10, n);
  const int vertex = grid.coarse_vertex(5, 5);
  for (auto _ : state) benchmark::DoNotOptimize(local_displacement_eig(grid, medium, vertex, 20));
}
BENCHMARK(BM_DisplacementEigen)->Arg(80)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_FineReference(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  const ScenarioContext ctx(cfg);
  const DofMasks masks = DofMasks::from(ctx.spaces());
  const auto loads = ctx.loads(10);
  for (auto _ : state) {
    const InitialData init = initialize(ctx.operators(), masks, ctx.fine_initial_pressure());
    benchmark::DoNotOptimize(run({Scheme::FixedStress, 1.0, 10}, ctx.operators(), masks, loads, init, false));
  }
}
BENCHMARK(BM_FineReference)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_MultiscalePoint(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.n = 80;
  const ScenarioContext ctx(cfg);
  ctx.multiscale_space(cfg.Ju, cfg.Jg, SpectralProblem::EdgeFlux);  // offline work outside the loop
  ctx.reference(cfg.scheme, cfg.T, cfg.Jt);
  for (auto _ : state) benchmark::DoNotOptimize(run_point(ctx, cfg));
}
BENCHMARK(BM_MultiscalePoint)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
