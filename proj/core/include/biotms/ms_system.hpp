#pragma once

#include "biotms/displacement_offline.hpp"
#include "biotms/time_integrator.hpp"
#include "biotms/velocity_offline.hpp"

namespace biotms {

/// The three multiscale spaces as prolongations into the fine spaces.
struct MultiscaleSpace {
  Prolongation u;
  Prolongation g;
  CoarsePressureSpace p;

  [[nodiscard]] int num_displacement() const { return u.num_columns(); }
  [[nodiscard]] int num_velocity() const { return g.num_columns(); }
  [[nodiscard]] int num_pressure() const { return p.num_columns(); }
  [[nodiscard]] DofMasks masks() const { return {u.column_free, g.column_free}; }
};

/// Galerkin projections R^T op R with the prolongation pair matching each
/// operator's row and column spaces.
OperatorSet project_operators(const OperatorSet& fine, const MultiscaleSpace& ms);

/// R_p^T F.
Vec project_load(const MultiscaleSpace& ms, const Vec& fine_load);

/// Fine-space representation (R_u u, R_g g, R_p p) of a coarse state.
SystemState downscale(const MultiscaleSpace& ms, const SystemState& coarse);

struct MultiscaleSolution {
  Trajectory coarse;
  /// Downscaled states, one per entry of coarse.states.
  std::vector<SystemState> fine;
  Vec fine_initial_previous_displacement;
};

/// Projects the operators and loads, initializes from the coarse initial
/// pressure and runs the configured scheme on the coarse system.
MultiscaleSolution solve_multiscale(const OperatorSet& fine_ops, const MultiscaleSpace& ms, const SchemeConfig& config,
                                    std::span<const Vec> fine_loads, const Vec& coarse_initial_pressure);

struct ConservationReport {
  /// residuals[k][K]: |mass balance| of step k+1 integrated over coarse cell K.
  std::vector<std::vector<double>> residuals;
  double max_residual = 0.0;
  /// 1e-9 (max_k ||F_k||_inf + 1).
  double threshold = 0.0;

  [[nodiscard]] bool conserved() const { return max_residual <= threshold; }
};

/// Evaluates the fine discrete mass balance on the downscaled history and
/// sums it over each coarse cell.
ConservationReport conservation_report(const GridHierarchy& grid, const OperatorSet& fine_ops, Scheme scheme,
                                       std::span<const SystemState> fine_history, const Vec& initial_previous_displacement,
                                       double tau, std::span<const Vec> fine_loads);

}  // namespace biotms
