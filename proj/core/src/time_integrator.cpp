#include "biotms/time_integrator.hpp"

#include <cmath>

namespace biotms {

Scheme parse_scheme(const std::string& name) {
  if (name == "fixed_stress") return Scheme::FixedStress;
  if (name == "fully_coupled") return Scheme::FullyCoupled;
  throw InvalidInput("unknown scheme '" + name + "' (expected fixed_stress or fully_coupled)");
}

std::string to_string(Scheme scheme) {
  return scheme == Scheme::FixedStress ? "fixed_stress" : "fully_coupled";
}

void SchemeConfig::validate() const {
  if (steps < 1) throw InvalidInput("scheme config: number of time steps must be >= 1");
  if (!(final_time > 0.0)) throw InvalidInput("scheme config: final time must be positive");
}

DofMasks DofMasks::all_free(const OperatorSet& ops) {
  return {DofMask(static_cast<std::size_t>(ops.num_displacement()), 1),
          DofMask(static_cast<std::size_t>(ops.num_velocity()), 1)};
}

namespace {

void append_block(std::vector<Triplet>& trips, const SpMat& block, int row0, int col0, double scale) {
  for (int k = 0; k < block.outerSize(); ++k)
    for (SpMat::InnerIterator it(block, k); it; ++it)
      trips.emplace_back(row0 + static_cast<int>(it.row()), col0 + static_cast<int>(it.col()), scale * it.value());
}

SpMat assemble_blocks(int size, const std::vector<Triplet>& trips) {
  SpMat m(size, size);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

void check_operator_shapes(const OperatorSet& ops, const DofMasks& masks) {
  const auto nu = ops.num_displacement();
  const auto ng = ops.num_velocity();
  const auto np = ops.num_pressure();
  const bool ok = ops.A.cols() == nu && ops.B.rows() == nu && ops.B.cols() == np && ops.C.rows() == np &&
                  ops.C.cols() == nu && ops.D.cols() == np && ops.E.rows() == np && ops.E.cols() == ng &&
                  ops.J.cols() == ng && ops.K.rows() == ng && ops.K.cols() == np &&
                  static_cast<int>(masks.displacement.size()) == nu && static_cast<int>(masks.velocity.size()) == ng;
  if (!ok) throw InvalidInput("time integrator: operator or mask dimensions are inconsistent");
}

// The block solvers are built in symmetric form, which needs C = B^T and
// E = K^T (true for the fine operators and for any Galerkin projection).
void check_transposes(const OperatorSet& ops) {
  const auto rel = [](const SpMat& a, const SpMat& b) {
    const double scale = std::max(a.norm(), 1e-300);
    return SpMat(a - b).norm() / scale;
  };
  if (rel(ops.C, SpMat(ops.B.transpose())) > 1e-10 || rel(ops.E, SpMat(ops.K.transpose())) > 1e-10) {
    throw InvalidInput("time integrator: coupling operators are not transposes of each other");
  }
}

Vec solve_masked_spd(const SpMat& matrix, const SpMat& S, const Vec& rhs) {
  const SpMat reduced = S.transpose() * matrix * S;
  SymmetricSolver solver(reduced, std::vector<signed char>(static_cast<std::size_t>(reduced.rows()), 1));
  return S * solver.solve(S.transpose() * rhs);
}

}  // namespace

InitialData initialize(const OperatorSet& ops, const DofMasks& masks, const Vec& p0) {
  check_operator_shapes(ops, masks);
  if (p0.size() != ops.num_pressure()) throw InvalidInput("initialize: initial pressure has wrong length");
  InitialData init;
  init.state.p = p0;
  init.state.time = 0.0;
  init.state.u = solve_masked_spd(ops.A, selection_matrix(masks.displacement), ops.B * p0);
  init.state.g = solve_masked_spd(ops.J, selection_matrix(masks.velocity), ops.K * p0);
  init.previous_displacement = init.state.u;
  return init;
}

TimeIntegrator::TimeIntegrator(const OperatorSet& ops, DofMasks masks, Scheme scheme, double tau)
    : masks_(std::move(masks)), scheme_(scheme), tau_(tau) {
  check_operator_shapes(ops, masks_);
  check_transposes(ops);
  if (!(tau > 0.0)) throw InvalidInput("time integrator: step size must be positive");

  Su_ = selection_matrix(masks_.displacement);
  Sg_ = selection_matrix(masks_.velocity);
  A_ff_ = Su_.transpose() * ops.A * Su_;
  B_f_ = Su_.transpose() * ops.B;
  J_ff_ = Sg_.transpose() * ops.J * Sg_;
  K_f_ = Sg_.transpose() * ops.K;
  B_ = ops.B;
  C_ = ops.C;
  D_ = ops.D;

  const int nu = static_cast<int>(A_ff_.rows());
  const int ng = static_cast<int>(J_ff_.rows());
  const int np = static_cast<int>(D_.rows());
  const SpMat Kt = K_f_.transpose();

  if (scheme_ == Scheme::FixedStress) {
    elasticity_ = std::make_unique<SymmetricSolver>(A_ff_, std::vector<signed char>(static_cast<std::size_t>(nu), 1));
    std::vector<Triplet> trips;
    append_block(trips, J_ff_, 0, 0, tau_);
    append_block(trips, K_f_, 0, ng, -tau_);
    append_block(trips, Kt, ng, 0, -tau_);
    append_block(trips, D_, ng, ng, -1.0);
    std::vector<signed char> signs(static_cast<std::size_t>(ng + np), -1);
    std::fill(signs.begin(), signs.begin() + ng, 1);
    flow_ = std::make_unique<SymmetricSolver>(assemble_blocks(ng + np, trips), std::move(signs));
  } else {
    const SpMat Bt = B_f_.transpose();
    std::vector<Triplet> trips;
    append_block(trips, A_ff_, 0, 0, 1.0);
    append_block(trips, B_f_, 0, nu + ng, -1.0);
    append_block(trips, J_ff_, nu, nu, tau_);
    append_block(trips, K_f_, nu, nu + ng, -tau_);
    append_block(trips, Bt, nu + ng, 0, -1.0);
    append_block(trips, Kt, nu + ng, nu, -tau_);
    append_block(trips, D_, nu + ng, nu + ng, -1.0);
    std::vector<signed char> signs(static_cast<std::size_t>(nu + ng + np), -1);
    std::fill(signs.begin(), signs.begin() + nu + ng, 1);
    monolithic_ = std::make_unique<SymmetricSolver>(assemble_blocks(nu + ng + np, trips), std::move(signs));
  }
}

void TimeIntegrator::check_state(const SystemState& s, const Vec& load) const {
  if (s.u.size() != Su_.rows() || s.g.size() != Sg_.rows() || s.p.size() != D_.rows() || load.size() != D_.rows()) {
    throw InvalidInput("time integrator: state or load has wrong length");
  }
}

SystemState TimeIntegrator::fixed_stress_step(const SystemState& current, const Vec& previous_displacement,
                                              const Vec& load) const {
  if (!flow_) throw InvalidInput("time integrator: built for the fully coupled scheme");
  check_state(current, load);
  if (previous_displacement.size() != current.u.size()) throw InvalidInput("fixed_stress_step: u_prev length");
  const int ng = static_cast<int>(J_ff_.rows());
  const int np = static_cast<int>(D_.rows());

  Vec rhs = Vec::Zero(ng + np);
  rhs.tail(np) = -tau_ * load + C_ * (current.u - previous_displacement) - D_ * current.p;
  const Vec sol = flow_->solve(rhs);

  SystemState next;
  next.time = current.time + tau_;
  next.g = Sg_ * sol.head(ng);
  next.p = sol.tail(np);
  next.u = Su_ * elasticity_->solve(B_f_ * next.p);
  return next;
}

SystemState TimeIntegrator::fully_coupled_step(const SystemState& current, const Vec& load) const {
  if (!monolithic_) throw InvalidInput("time integrator: built for the fixed-stress scheme");
  check_state(current, load);
  const int nu = static_cast<int>(A_ff_.rows());
  const int ng = static_cast<int>(J_ff_.rows());
  const int np = static_cast<int>(D_.rows());

  Vec rhs = Vec::Zero(nu + ng + np);
  rhs.tail(np) = -tau_ * load - C_ * current.u - D_ * current.p;
  const Vec sol = monolithic_->solve(rhs);

  SystemState next;
  next.time = current.time + tau_;
  next.u = Su_ * sol.head(nu);
  next.g = Sg_ * sol.segment(nu, ng);
  next.p = sol.tail(np);
  return next;
}

SystemState fixed_stress_step(const OperatorSet& ops, const DofMasks& masks, const SystemState& current,
                              const Vec& previous_displacement, double tau, const Vec& load) {
  return TimeIntegrator(ops, masks, Scheme::FixedStress, tau).fixed_stress_step(current, previous_displacement, load);
}

SystemState fully_coupled_step(const OperatorSet& ops, const DofMasks& masks, const SystemState& current,
                               double tau, const Vec& load) {
  return TimeIntegrator(ops, masks, Scheme::FullyCoupled, tau).fully_coupled_step(current, load);
}

Trajectory run(const SchemeConfig& config, const OperatorSet& ops, const DofMasks& masks,
               std::span<const Vec> loads, const InitialData& init, bool keep_history) {
  config.validate();
  if (static_cast<int>(loads.size()) != config.steps) {
    throw InvalidInput("run: expected " + std::to_string(config.steps) + " loads, got " + std::to_string(loads.size()));
  }
  const double tau = config.step_size();
  TimeIntegrator integrator(ops, masks, config.scheme, tau);

  Trajectory traj;
  traj.scheme = config.scheme;
  traj.tau = tau;
  traj.initial_previous_displacement = init.previous_displacement;
  traj.states.push_back(init.state);

  SystemState current = init.state;
  Vec previous = init.previous_displacement;
  for (int step = 0; step < config.steps; ++step) {
    SystemState next = config.scheme == Scheme::FixedStress
                           ? integrator.fixed_stress_step(current, previous, loads[static_cast<std::size_t>(step)])
                           : integrator.fully_coupled_step(current, loads[static_cast<std::size_t>(step)]);
    next.time = (step + 1) * tau;
    previous = std::move(current.u);
    current = std::move(next);
    if (keep_history) traj.states.push_back(current);
  }
  if (!keep_history) traj.states.push_back(std::move(current));
  return traj;
}

Vec mass_balance_residual(const OperatorSet& ops, Scheme scheme, const SystemState& before,
                          const SystemState& after, const Vec& previous_displacement, double tau, const Vec& load) {
  const Vec du = scheme == Scheme::FixedStress ? Vec(before.u - previous_displacement) : Vec(after.u - before.u);
  return ops.E * after.g + ops.D * (after.p - before.p) / tau + ops.C * du / tau - load;
}

}  // namespace biotms
