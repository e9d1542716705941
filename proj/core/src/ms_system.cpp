#include "biotms/ms_system.hpp"

#include <cmath>

namespace biotms {

namespace {

SpMat congruence(const SpMat& left, const SpMat& op, const SpMat& right) {
  SpMat out = SpMat(left.transpose()) * (op * right);
  out.prune(0.0);
  out.makeCompressed();
  return out;
}

}  // namespace

OperatorSet project_operators(const OperatorSet& fine, const MultiscaleSpace& ms) {
  const SpMat& Ru = ms.u.R;
  const SpMat& Rg = ms.g.R;
  const SpMat& Rp = ms.p.R;
  if (Ru.rows() != fine.num_displacement() || Rg.rows() != fine.num_velocity() || Rp.rows() != fine.num_pressure()) {
    throw InvalidInput("project_operators: prolongation row counts do not match the fine operators");
  }
  if (static_cast<Eigen::Index>(ms.u.column_free.size()) != Ru.cols() ||
      static_cast<Eigen::Index>(ms.g.column_free.size()) != Rg.cols()) {
    throw InvalidInput("project_operators: column masks do not match the prolongations");
  }
  OperatorSet c;
  c.A = congruence(Ru, fine.A, Ru);
  c.B = congruence(Ru, fine.B, Rp);
  c.C = congruence(Rp, fine.C, Ru);
  c.D = congruence(Rp, fine.D, Rp);
  c.E = congruence(Rp, fine.E, Rg);
  c.J = congruence(Rg, fine.J, Rg);
  c.K = congruence(Rg, fine.K, Rp);
  return c;
}

Vec project_load(const MultiscaleSpace& ms, const Vec& fine_load) {
  if (fine_load.size() != ms.p.R.rows()) throw InvalidInput("project_load: load has wrong length");
  return ms.p.R.transpose() * fine_load;
}

SystemState downscale(const MultiscaleSpace& ms, const SystemState& coarse) {
  if (coarse.u.size() != ms.u.R.cols() || coarse.g.size() != ms.g.R.cols() || coarse.p.size() != ms.p.R.cols()) {
    throw InvalidInput("downscale: state does not match the multiscale space");
  }
  return {ms.u.R * coarse.u, ms.g.R * coarse.g, ms.p.R * coarse.p, coarse.time};
}

MultiscaleSolution solve_multiscale(const OperatorSet& fine_ops, const MultiscaleSpace& ms, const SchemeConfig& config,
                                    std::span<const Vec> fine_loads, const Vec& coarse_p0) {
  const OperatorSet coarse = project_operators(fine_ops, ms);
  std::vector<Vec> loads;
  loads.reserve(fine_loads.size());
  for (const Vec& f : fine_loads) loads.push_back(project_load(ms, f));
  const DofMasks masks = ms.masks();
  const InitialData init = initialize(coarse, masks, coarse_p0);

  MultiscaleSolution out;
  out.coarse = run(config, coarse, masks, loads, init, true);
  out.fine.reserve(out.coarse.states.size());
  for (const auto& s : out.coarse.states) out.fine.push_back(downscale(ms, s));
  out.fine_initial_previous_displacement = ms.u.R * init.previous_displacement;
  return out;
}

ConservationReport conservation_report(const GridHierarchy& grid, const OperatorSet& fine_ops, Scheme scheme,
                                       std::span<const SystemState> history, const Vec& initial_previous, double tau,
                                       std::span<const Vec> fine_loads) {
  if (history.size() != fine_loads.size() + 1) {
    throw InvalidInput("conservation_report: history must hold one more state than there are loads");
  }
  ConservationReport report;
  double load_scale = 0.0;
  for (const Vec& f : fine_loads) load_scale = std::max(load_scale, f.lpNorm<Eigen::Infinity>());
  report.threshold = 1e-9 * (load_scale + 1.0);

  for (std::size_t k = 0; k + 1 < history.size(); ++k) {
    const Vec& previous = k == 0 ? initial_previous : history[k - 1].u;
    const Vec r = mass_balance_residual(fine_ops, scheme, history[k], history[k + 1], previous, tau, fine_loads[k]);
    std::vector<double> cells(static_cast<std::size_t>(grid.num_coarse_cells()), 0.0);
    for (int c = 0; c < grid.num_fine_cells(); ++c) cells[static_cast<std::size_t>(grid.coarse_cell_of(c))] += r[c];
    for (double& v : cells) {
      v = std::abs(v);
      report.max_residual = std::max(report.max_residual, v);
    }
    report.residuals.push_back(std::move(cells));
  }
  return report;
}

}  // namespace biotms
