#pragma once

#include <memory>
#include <span>
#include <string>

#include "biotms/fine_fem.hpp"
#include "biotms/linear_solver.hpp"

namespace biotms {

enum class Scheme { FixedStress, FullyCoupled };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);

struct SchemeConfig {
  Scheme scheme = Scheme::FixedStress;
  double final_time = 1.0;
  int steps = 10;

  [[nodiscard]] double step_size() const { return final_time / steps; }
  void validate() const;
};

/// Coefficient vectors (u, g, p) at one time level, in whatever space the
/// operators were given in (fine or multiscale).
struct SystemState {
  Vec u;
  Vec g;
  Vec p;
  double time = 0.0;
};

/// Free-DOF masks for the displacement and velocity unknowns. Constrained
/// entries are held at zero.
struct DofMasks {
  DofMask displacement;
  DofMask velocity;

  static DofMasks from(const FineSpaces& spaces) { return {spaces.displacement_free, spaces.velocity_free}; }
  static DofMasks all_free(const OperatorSet& ops);
};

struct InitialData {
  SystemState state;
  /// Displacement one level before t = 0 (taken equal to u^0).
  Vec previous_displacement;
};

/// p^0 as given; u^0 from a(u^0, v) = b(v, p^0); g^0 from j(z, g^0) = k(z, p^0).
InitialData initialize(const OperatorSet& ops, const DofMasks& masks, const Vec& initial_pressure);

/// Holds the factorizations for one operator set and step size so that
/// repeated steps reuse them.
class TimeIntegrator {
 public:
  TimeIntegrator(const OperatorSet& ops, DofMasks masks, Scheme scheme, double tau);

  /// Flow block (g, p) first with the displacement lagged, then elasticity.
  [[nodiscard]] SystemState fixed_stress_step(const SystemState& current, const Vec& previous_displacement,
                                              const Vec& load) const;
  /// Monolithic (u, g, p) solve.
  [[nodiscard]] SystemState fully_coupled_step(const SystemState& current, const Vec& load) const;

  [[nodiscard]] Scheme scheme() const { return scheme_; }
  [[nodiscard]] double step_size() const { return tau_; }

 private:
  void check_state(const SystemState& s, const Vec& load) const;

  DofMasks masks_;
  Scheme scheme_;
  double tau_;
  SpMat Su_;  // selection of free displacement DOFs
  SpMat Sg_;  // selection of free velocity DOFs
  SpMat A_ff_;
  SpMat B_f_;
  SpMat J_ff_;
  SpMat K_f_;
  SpMat B_;
  SpMat C_;
  SpMat D_;
  std::unique_ptr<SymmetricSolver> elasticity_;
  std::unique_ptr<SymmetricSolver> flow_;
  std::unique_ptr<SymmetricSolver> monolithic_;
};

SystemState fixed_stress_step(const OperatorSet& ops, const DofMasks& masks, const SystemState& current,
                              const Vec& previous_displacement, double tau, const Vec& load);
SystemState fully_coupled_step(const OperatorSet& ops, const DofMasks& masks, const SystemState& current,
                               double tau, const Vec& load);

struct Trajectory {
  Scheme scheme = Scheme::FixedStress;
  double tau = 0.0;
  /// states[0] is the initial state; with history off only the initial and
  /// final states are kept.
  std::vector<SystemState> states;
  Vec initial_previous_displacement;

  [[nodiscard]] const SystemState& final_state() const { return states.back(); }
};

/// Applies the configured step `steps` times. `loads[k]` is the load for
/// step k+1 (evaluated at the end of the interval).
Trajectory run(const SchemeConfig& config, const OperatorSet& ops, const DofMasks& masks,
               std::span<const Vec> loads, const InitialData& init, bool keep_history = true);

/// Residual of the discrete mass balance, as a vector over the pressure space:
///   E g1 + D (p1 - p0)/tau + C du/tau - F
/// with du = u0 - u_prev (fixed stress) or u1 - u0 (fully coupled).
Vec mass_balance_residual(const OperatorSet& ops, Scheme scheme, const SystemState& before,
                          const SystemState& after, const Vec& previous_displacement, double tau, const Vec& load);

}  // namespace biotms
