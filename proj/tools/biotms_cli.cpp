// Command line driver: single scenario runs and parameter sweeps.
//
//   biotms run   --config model1.cfg [--model model2] [--N 10] [--check]
//   biotms sweep --config model1.cfg --vary Ju=4,8,12,16,20,24
//
// Worker threads: BIOTMS_WORKERS (default: hardware concurrency).

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>

#include "biotms/parallel.hpp"
#include "biotms/scenario.hpp"

namespace {

struct Overrides {
  std::optional<std::string> model, scheme, field, output;
  std::optional<int> N, n, Ju, Jg, Jt, spectral_problem;
  std::optional<double> T;
  std::vector<std::string> assignments;  // --set key=value

  void add_to(CLI::App* app) {
    app->add_option("--model", model, "model1 (flux-free boundary) or model2 (p = 0 on the boundary)");
    app->add_option("--N", N, "coarse cells per side");
    app->add_option("--n", n, "fine cells per side");
    app->add_option("--Ju", Ju, "displacement modes per coarse vertex");
    app->add_option("--Jg", Jg, "velocity modes per coarse edge");
    app->add_option("--Jt", Jt, "time steps");
    app->add_option("--T", T, "final time");
    app->add_option("--scheme", scheme, "fixed_stress or fully_coupled");
    app->add_option("--spectral-problem", spectral_problem, "velocity spectral problem, 1 or 2");
    app->add_option("--field", field, "channels, blobs or a permeability file");
    app->add_option("--output", output, "output directory");
    app->add_option("--set", assignments, "any config key, as key=value")->take_all();
  }

  void apply(biotms::ScenarioConfig& cfg) const {
    if (model) cfg.set("model", *model);
    if (N) cfg.N = *N;
    if (n) cfg.n = *n;
    if (Ju) cfg.Ju = *Ju;
    if (Jg) cfg.Jg = *Jg;
    if (Jt) cfg.Jt = *Jt;
    if (T) cfg.T = *T;
    if (scheme) cfg.set("scheme", *scheme);
    if (spectral_problem) cfg.spectral_problem = *spectral_problem;
    if (field) cfg.field = *field;
    if (output) cfg.output = *output;
    for (const auto& a : assignments) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw biotms::InvalidInput("--set expects key=value, got '" + a + "'");
      cfg.set(a.substr(0, eq), a.substr(eq + 1));
    }
  }
};

biotms::ScenarioConfig resolve(const std::string& config_path, const Overrides& overrides) {
  biotms::ScenarioConfig cfg = config_path.empty() ? biotms::ScenarioConfig{} : biotms::load_config(config_path);
  overrides.apply(cfg);
  cfg.validate();
  return cfg;
}

void print_result(const biotms::PointResult& r) {
  std::printf("%s\n%s\n", biotms::csv_header().c_str(), biotms::csv_row(r.errors).c_str());
  std::printf("coarse dofs %d, max conservation residual %.3e (threshold %.3e)\n", r.coarse_dofs,
              r.conservation.max_residual, r.conservation.threshold);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale solver for Biot poroelasticity on high-contrast media"};
  app.require_subcommand(1);

  std::string run_config;
  bool check = false;
  Overrides run_overrides;
  auto* run = app.add_subcommand("run", "run one scenario and write its outputs");
  run->add_option("--config", run_config, "key = value configuration file")->check(CLI::ExistingFile);
  run->add_flag("--check", check, "exit nonzero unless conservation holds and e_p, e_u <= 0.1");
  run_overrides.add_to(run);

  std::string sweep_config;
  std::vector<std::string> vary;
  Overrides sweep_overrides;
  auto* sweep = app.add_subcommand("sweep", "run the cartesian product of parameter lists");
  sweep->add_option("--config", sweep_config, "key = value configuration file")->check(CLI::ExistingFile);
  sweep->add_option("--vary", vary, "key=v1,v2,... (repeatable)")->take_all();
  sweep_overrides.add_to(sweep);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto start = std::chrono::steady_clock::now();
    if (*run) {
      const biotms::ScenarioConfig cfg = resolve(run_config, run_overrides);
      const biotms::PointResult r = biotms::run_scenario(cfg);
      print_result(r);
      std::printf("outputs in %s (%.1f s)\n", cfg.output.c_str(),
                  std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      if (check) {
        std::string reason;
        if (!biotms::passes_check(r, &reason)) {
          std::fprintf(stderr, "check failed: %s\n", reason.c_str());
          return 2;
        }
        std::printf("check passed\n");
      }
    } else {
      biotms::ScenarioConfig cfg = resolve(sweep_config, sweep_overrides);
      for (const auto& v : vary) {
        const auto eq = v.find('=');
        if (eq == std::string::npos) throw biotms::InvalidInput("--vary expects key=list, got '" + v + "'");
        cfg.set("sweep." + v.substr(0, eq), v.substr(eq + 1));
      }
      const auto results = biotms::run_sweep(cfg, biotms::worker_count());
      std::printf("%s\n", biotms::csv_header().c_str());
      for (const auto& r : results) std::printf("%s\n", biotms::csv_row(r.errors).c_str());
      std::printf("%zu points, outputs in %s (%.1f s)\n", results.size(), cfg.output.c_str(),
                  std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
