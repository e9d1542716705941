#include "biotms/velocity_offline.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <memory>
#include <numeric>

#include "biotms/local_eigen.hpp"
#include "biotms/parallel.hpp"

namespace biotms {

SpectralProblem parse_spectral_problem(int id) {
  if (id == 1) return SpectralProblem::EdgeFlux;
  if (id == 2) return SpectralProblem::PressureJump;
  throw InvalidInput("spectral problem must be 1 or 2, got " + std::to_string(id));
}

int SnapshotSet::total() const {
  return std::accumulate(edges.begin(), edges.end(), 0, [](int acc, const EdgeSnapshots& e) { return acc + e.count(); });
}

double edge_permeability(const GridHierarchy& grid, const PoroelasticMedium& med, int fine_edge) {
  const auto cells = grid.fine_edge_cells(fine_edge);
  if (cells[0] < 0) return med.kappa[static_cast<std::size_t>(cells[1])];
  if (cells[1] < 0) return med.kappa[static_cast<std::size_t>(cells[0])];
  const double k0 = med.kappa[static_cast<std::size_t>(cells[0])];
  const double k1 = med.kappa[static_cast<std::size_t>(cells[1])];
  return 2.0 * k0 * k1 / (k0 + k1);
}

namespace {

/// Mixed Darcy problem on one coarse block with every boundary flux
/// prescribed. Unknowns: interior normal velocities, cell pressures and a
/// multiplier closing the zero-mean pressure constraint. The matrix does not
/// depend on the boundary data, so one factorization serves all four edges.
class BlockMixedSolver {
 public:
  BlockMixedSolver(const GridHierarchy& grid, const PoroelasticMedium& med, int coarse_cell)
      : grid_(grid), coarse_cell_(coarse_cell) {
    const auto cell_list = grid.fine_cells_in(coarse_cell);
    cells_ = LocalIndexMap(cell_list);
    std::vector<int> edge_list;
    for (int c : cell_list)
      for (int e : grid.fine_cell_edges(c)) edge_list.push_back(e);
    edges_ = LocalIndexMap(std::move(edge_list));

    for (int l = 0; l < edges_.size(); ++l) {
      const auto adj = grid.fine_edge_cells(edges_.global(l));
      const bool inside = adj[0] >= 0 && adj[1] >= 0 && cells_.contains(adj[0]) && cells_.contains(adj[1]);
      (inside ? interior_ : boundary_).push_back(l);
    }

    std::vector<double> weight(med.kappa.size());
    for (std::size_t c = 0; c < weight.size(); ++c) weight[c] = med.viscosity / med.kappa[c];
    J_ = assemble_velocity_mass(grid, cell_list, &edges_, weight);
    E_ = assemble_divergence(grid, cell_list, &cells_, &edges_);

    const int ni = static_cast<int>(interior_.size());
    const int nc = cells_.size();
    std::vector<int> interior_pos(static_cast<std::size_t>(edges_.size()), -1);
    for (int k = 0; k < ni; ++k) interior_pos[static_cast<std::size_t>(interior_[static_cast<std::size_t>(k)])] = k;

    std::vector<Triplet> trips;
    for (int col = 0; col < J_.outerSize(); ++col) {
      for (SpMat::InnerIterator it(J_, col); it; ++it) {
        const int r = interior_pos[static_cast<std::size_t>(it.row())];
        const int c = interior_pos[static_cast<std::size_t>(it.col())];
        if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
      }
    }
    for (int col = 0; col < E_.outerSize(); ++col) {
      for (SpMat::InnerIterator it(E_, col); it; ++it) {
        const int e = interior_pos[static_cast<std::size_t>(it.col())];
        if (e < 0) continue;
        const int cell_row = ni + static_cast<int>(it.row());
        trips.emplace_back(e, cell_row, -it.value());  // -k(z, p)
        trips.emplace_back(cell_row, e, it.value());   // e(q, g)
      }
    }
    for (int c = 0; c < nc; ++c) {
      trips.emplace_back(ni + c, ni + nc, 1.0);
      trips.emplace_back(ni + nc, ni + c, 1.0);
    }
    SpMat system(ni + nc + 1, ni + nc + 1);
    system.setFromTriplets(trips.begin(), trips.end());
    system.makeCompressed();
    lu_.analyzePattern(system);
    lu_.factorize(system);
    if (lu_.info() != Eigen::Success) throw SolverError("snapshot block solve: factorization failed");
  }

  [[nodiscard]] const LocalIndexMap& edges() const { return edges_; }
  [[nodiscard]] const LocalIndexMap& cells() const { return cells_; }
  [[nodiscard]] int coarse_cell() const { return coarse_cell_; }

  /// `boundary` holds prescribed normal velocities over the block's local
  /// edges (interior rows ignored), one column per right-hand side.
  void solve(const Mat& boundary, const Vec& source, Mat& velocity, Mat& pressure) const {
    const int ni = static_cast<int>(interior_.size());
    const int nc = cells_.size();
    const int m = static_cast<int>(boundary.cols());
    Mat gb = Mat::Zero(edges_.size(), m);
    for (int l : boundary_) gb.row(l) = boundary.row(l);

    const Mat Jg = J_ * gb;
    const Mat Eg = E_ * gb;
    const double area = grid_.fine_size() * grid_.fine_size();
    Mat rhs = Mat::Zero(ni + nc + 1, m);
    for (int k = 0; k < ni; ++k) rhs.row(k) = -Jg.row(interior_[static_cast<std::size_t>(k)]);
    for (int j = 0; j < m; ++j) rhs.col(j).segment(ni, nc) = Vec::Constant(nc, source[j] * area) - Eg.col(j);

    const Mat sol = lu_.solve(rhs);
    if (lu_.info() != Eigen::Success) throw SolverError("snapshot block solve failed");
    velocity = gb;
    for (int k = 0; k < ni; ++k) velocity.row(interior_[static_cast<std::size_t>(k)]) = sol.row(k);
    pressure = sol.block(ni, 0, nc, m);
  }

 private:
  GridHierarchy grid_;
  int coarse_cell_;
  LocalIndexMap cells_;
  LocalIndexMap edges_;
  std::vector<int> interior_;
  std::vector<int> boundary_;
  SpMat J_;
  SpMat E_;
  Eigen::SparseLU<SpMat> lu_;
};

// +1 when the coarse edge is the right or top side of the block, i.e. its
// fixed normal points out of the block.
double outward_sign(const GridHierarchy& grid, int coarse_cell, int coarse_edge) {
  const auto sides = grid.coarse_cell_edges(coarse_cell);
  if (coarse_edge == sides[1] || coarse_edge == sides[3]) return 1.0;
  if (coarse_edge == sides[0] || coarse_edge == sides[2]) return -1.0;
  throw InvalidInput("coarse edge is not a side of the block");
}

using BlockLookup = std::function<const BlockMixedSolver&(int)>;

EdgeSnapshots edge_snapshots_with(const GridHierarchy& grid, int coarse_edge, const std::vector<int>& fine_indices,
                                  const BlockLookup& block) {
  EdgeSnapshots snap;
  snap.coarse_edge = coarse_edge;
  snap.neighborhood = grid.edge_neighborhood(coarse_edge);
  snap.edge_fine_edges = grid.fine_edges_on(coarse_edge);
  const int m = static_cast<int>(fine_indices.size());
  const auto& nb = snap.neighborhood;
  snap.velocity = Mat::Zero(nb.edges.size(), m);
  snap.pressure = Mat::Zero(nb.cells.size(), m);

  const double H = grid.coarse_size();
  const double h = grid.fine_size();
  for (int K : nb.coarse_cells) {
    const BlockMixedSolver& solver = block(K);
    // Compatibility: int_K alpha = +/- int_E delta_j = +/- h.
    const double alpha = outward_sign(grid, K, coarse_edge) * h / (H * H);
    snap.block_source.push_back(alpha);

    Mat boundary = Mat::Zero(solver.edges().size(), m);
    for (int j = 0; j < m; ++j) {
      const int fine_edge = snap.edge_fine_edges[static_cast<std::size_t>(fine_indices[static_cast<std::size_t>(j)])];
      boundary(solver.edges().local(fine_edge), j) = 1.0;
    }
    Mat vel;
    Mat pres;
    solver.solve(boundary, Vec::Constant(m, alpha), vel, pres);
    for (int l = 0; l < solver.edges().size(); ++l) snap.velocity.row(nb.edges.local(solver.edges().global(l))) = vel.row(l);
    for (int l = 0; l < solver.cells().size(); ++l) snap.pressure.row(nb.cells.local(solver.cells().global(l))) = pres.row(l);
  }
  // Strongly imposed data on the coarse edge, bitwise.
  for (int j = 0; j < m; ++j) {
    for (int t = 0; t < static_cast<int>(snap.edge_fine_edges.size()); ++t) {
      snap.velocity(nb.edges.local(snap.edge_fine_edges[static_cast<std::size_t>(t)]), j) =
          t == fine_indices[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
    }
  }
  return snap;
}

EdgeSnapshots standalone_snapshots(const GridHierarchy& grid, const PoroelasticMedium& med, int coarse_edge,
                                   const std::vector<int>& fine_indices) {
  if (coarse_edge < 0 || coarse_edge >= grid.num_coarse_edges()) throw InvalidInput("snapshot: coarse edge out of range");
  if (med.n != grid.fine_per_side()) throw InvalidInput("snapshot: medium size does not match the grid");
  std::vector<std::unique_ptr<BlockMixedSolver>> blocks;
  for (int K : grid.edge_neighborhood(coarse_edge).coarse_cells) blocks.push_back(std::make_unique<BlockMixedSolver>(grid, med, K));
  return edge_snapshots_with(grid, coarse_edge, fine_indices, [&](int K) -> const BlockMixedSolver& {
    for (const auto& b : blocks)
      if (b->coarse_cell() == K) return *b;
    throw InvalidInput("snapshot: block not prepared");
  });
}

}  // namespace

EdgeSnapshots solve_snapshot(const GridHierarchy& grid, const PoroelasticMedium& med, int coarse_edge, int fine_index) {
  if (fine_index < 0 || fine_index >= grid.ratio()) throw InvalidInput("solve_snapshot: fine edge index out of range");
  return standalone_snapshots(grid, med, coarse_edge, {fine_index});
}

EdgeSnapshots solve_edge_snapshots(const GridHierarchy& grid, const PoroelasticMedium& med, int coarse_edge) {
  std::vector<int> all(static_cast<std::size_t>(grid.ratio()));
  std::iota(all.begin(), all.end(), 0);
  return standalone_snapshots(grid, med, coarse_edge, all);
}

SnapshotSet build_snapshot_space(const GridHierarchy& grid, const PoroelasticMedium& med) {
  if (med.n != grid.fine_per_side()) throw InvalidInput("snapshot: medium size does not match the grid");
  std::vector<std::unique_ptr<BlockMixedSolver>> blocks(static_cast<std::size_t>(grid.num_coarse_cells()));
  parallel_for(grid.num_coarse_cells(), [&](int K) {
    blocks[static_cast<std::size_t>(K)] = std::make_unique<BlockMixedSolver>(grid, med, K);
  });

  std::vector<int> all(static_cast<std::size_t>(grid.ratio()));
  std::iota(all.begin(), all.end(), 0);
  SnapshotSet set;
  set.edges.resize(static_cast<std::size_t>(grid.num_coarse_edges()));
  parallel_for(grid.num_coarse_edges(), [&](int e) {
    set.edges[static_cast<std::size_t>(e)] = edge_snapshots_with(
        grid, e, all, [&](int K) -> const BlockMixedSolver& { return *blocks[static_cast<std::size_t>(K)]; });
  });
  return set;
}

EdgeSpectrum edge_spectrum(const GridHierarchy& grid, const PoroelasticMedium& med, const EdgeSnapshots& snap,
                           SpectralProblem problem) {
  const auto& nb = snap.neighborhood;
  const auto& cells = nb.cells.globals();
  const double h = grid.fine_size();
  const int l = snap.count();
  if (l == 0) throw InvalidInput("edge_spectrum: no snapshots");

  std::vector<double> inv_kappa(med.kappa.size());
  for (std::size_t c = 0; c < inv_kappa.size(); ++c) inv_kappa[c] = 1.0 / med.kappa[c];
  const SpMat mass = assemble_velocity_mass(grid, cells, &nb.edges, inv_kappa);
  const Mat mass_form = snap.velocity.transpose() * (mass * snap.velocity);

  EdgeSpectrum out;
  out.coarse_edge = snap.coarse_edge;
  out.problem = problem;
  if (problem == SpectralProblem::EdgeFlux) {
    out.a_form = Mat::Zero(l, l);
    for (int t = 0; t < static_cast<int>(snap.edge_fine_edges.size()); ++t) {
      const int fe = snap.edge_fine_edges[static_cast<std::size_t>(t)];
      const Eigen::RowVectorXd trace = snap.velocity.row(nb.edges.local(fe));
      out.a_form += (h / edge_permeability(grid, med, fe)) * trace.transpose() * trace;
    }
    const SpMat div = assemble_divergence(grid, cells, &nb.cells, &nb.edges);
    const Mat dv = div * snap.velocity;  // cell integrals of div g
    out.s_form = mass_form + dv.transpose() * dv / (h * h);
  } else {
    out.a_form = mass_form;
    Mat jumps(static_cast<Eigen::Index>(snap.edge_fine_edges.size()), l);
    for (int t = 0; t < static_cast<int>(snap.edge_fine_edges.size()); ++t) {
      const auto adj = grid.fine_edge_cells(snap.edge_fine_edges[static_cast<std::size_t>(t)]);
      for (int j = 0; j < l; ++j) {
        const double below = adj[0] >= 0 ? snap.pressure(nb.cells.local(adj[0]), j) : 0.0;
        const double above = adj[1] >= 0 ? snap.pressure(nb.cells.local(adj[1]), j) : 0.0;
        jumps(t, j) = below - above;
      }
    }
    out.s_form = h * jumps.transpose() * jumps;
  }
  out.a_form = 0.5 * (out.a_form + out.a_form.transpose()).eval();
  out.s_form = 0.5 * (out.s_form + out.s_form.transpose()).eval();

  const double trace = out.s_form.trace();
  Eigen::SelfAdjointEigenSolver<Mat> s_eig(out.s_form, Eigen::EigenvaluesOnly);
  if (!(s_eig.eigenvalues().minCoeff() > 1e-12 * trace)) {
    if (problem == SpectralProblem::EdgeFlux) {
      throw SolverError("edge spectrum: snapshot Gram matrix is not positive definite (edge " +
                        std::to_string(snap.coarse_edge) + ")");
    }
    out.s_form += 1e-12 * trace * Mat::Identity(l, l);
    out.regularized = true;
  }
  EigenPairs pairs = dense_generalized_eigen(out.a_form, out.s_form);
  out.eigenvalues = std::move(pairs.values);
  out.eigenvectors = std::move(pairs.vectors);
  return out;
}

EdgeOfflineBasis truncate(const EdgeSpectrum& spectrum, const EdgeSnapshots& snap, int retained) {
  if (retained < 1 || retained > snap.count()) {
    throw InvalidInput("spectral reduction: retained mode count must be in [1, " + std::to_string(snap.count()) + "]");
  }
  EdgeOfflineBasis basis;
  basis.coarse_edge = spectrum.coarse_edge;
  basis.support_edges = snap.neighborhood.edges.globals();
  basis.eigenvalues = spectrum.eigenvalues.head(retained);
  basis.coefficients = spectrum.eigenvectors.leftCols(retained);
  basis.fields = snap.velocity * basis.coefficients;
  basis.regularized = spectrum.regularized;
  return basis;
}

EdgeOfflineBasis spectral_reduce_1(const GridHierarchy& grid, const PoroelasticMedium& med, const SnapshotSet& snaps,
                                   int coarse_edge, int retained) {
  const auto& snap = snaps.edges.at(static_cast<std::size_t>(coarse_edge));
  return truncate(edge_spectrum(grid, med, snap, SpectralProblem::EdgeFlux), snap, retained);
}

EdgeOfflineBasis spectral_reduce_2(const GridHierarchy& grid, const PoroelasticMedium& med, const SnapshotSet& snaps,
                                   int coarse_edge, int retained) {
  const auto& snap = snaps.edges.at(static_cast<std::size_t>(coarse_edge));
  return truncate(edge_spectrum(grid, med, snap, SpectralProblem::PressureJump), snap, retained);
}

std::vector<EdgeSpectrum> all_edge_spectra(const GridHierarchy& grid, const PoroelasticMedium& med,
                                           const SnapshotSet& snaps, SpectralProblem problem) {
  std::vector<EdgeSpectrum> spectra(snaps.edges.size());
  parallel_for(static_cast<int>(snaps.edges.size()), [&](int e) {
    spectra[static_cast<std::size_t>(e)] = edge_spectrum(grid, med, snaps.edges[static_cast<std::size_t>(e)], problem);
  });
  return spectra;
}

VelocityOfflineBasis truncate_all(const std::vector<EdgeSpectrum>& spectra, const SnapshotSet& snaps, int retained) {
  if (spectra.size() != snaps.edges.size()) throw InvalidInput("truncate_all: spectra and snapshots differ in size");
  VelocityOfflineBasis basis;
  basis.edges.reserve(spectra.size());
  for (std::size_t e = 0; e < spectra.size(); ++e) {
    basis.edges.push_back(truncate(spectra[e], snaps.edges[e], std::min(retained, snaps.edges[e].count())));
  }
  return basis;
}

Prolongation assemble_velocity_prolongation(const GridHierarchy& grid, const VelocityOfflineBasis& basis,
                                            const BoundarySpec& boundary) {
  boundary.validate();
  std::vector<Triplet> trips;
  Prolongation P;
  int col = 0;
  for (const auto& eb : basis.edges) {
    const bool constrained = (boundary_side_of_coarse_edge(grid, eb.coarse_edge) & boundary.no_flux_sides) != 0u;
    for (int k = 0; k < eb.fields.cols(); ++k, ++col) {
      for (int l = 0; l < static_cast<int>(eb.support_edges.size()); ++l) {
        const double v = eb.fields(l, k);
        if (v != 0.0) trips.emplace_back(eb.support_edges[static_cast<std::size_t>(l)], col, v);
      }
      P.column_free.push_back(constrained ? 0 : 1);
    }
  }
  P.R = SpMat(grid.num_fine_edges(), col);
  P.R.setFromTriplets(trips.begin(), trips.end());
  P.R.makeCompressed();
  return P;
}

}  // namespace biotms
