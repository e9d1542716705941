#pragma once

#include <string>

#include "biotms/fine_fem.hpp"

namespace biotms {

/// Local spectral problem used to rank snapshot modes on a coarse edge.
///   EdgeFlux:     a = int_E kappa^-1 (g.m)(z.m),  s = int_w kappa^-1 g.z + int_w div g div z
///   PressureJump: a = int_w kappa^-1 g.z,         s = int_E [p_g][p_z]
enum class SpectralProblem { EdgeFlux = 1, PressureJump = 2 };

SpectralProblem parse_spectral_problem(int id);

/// Unit-flux mixed solves on the neighborhood of one coarse edge.
struct EdgeSnapshots {
  int coarse_edge = -1;
  Neighborhood neighborhood;
  std::vector<int> edge_fine_edges;  ///< fine edges of the coarse edge, ordered
  /// Constant divergence imposed in each member block (same order as
  /// neighborhood.coarse_cells); identical for every snapshot of the edge.
  std::vector<double> block_source;
  Mat velocity;  ///< neighborhood.edges x l_i, normal components on fine edges
  Mat pressure;  ///< neighborhood.cells x l_i, zero mean per block

  [[nodiscard]] int count() const { return static_cast<int>(velocity.cols()); }
};

struct SnapshotSet {
  std::vector<EdgeSnapshots> edges;  ///< indexed by coarse edge

  [[nodiscard]] int total() const;
};

/// Snapshot j of coarse edge i: on each block of the edge neighborhood,
/// kappa^-1 nu g + grad p = 0, div g = alpha, with g.m = delta_j on the coarse
/// edge and g.n = 0 on the rest of the block boundary.
EdgeSnapshots solve_snapshot(const GridHierarchy& grid, const PoroelasticMedium& medium, int coarse_edge,
                             int fine_index);
/// All l_i snapshots of one coarse edge.
EdgeSnapshots solve_edge_snapshots(const GridHierarchy& grid, const PoroelasticMedium& medium, int coarse_edge);
SnapshotSet build_snapshot_space(const GridHierarchy& grid, const PoroelasticMedium& medium);

/// Full eigendecomposition of the edge spectral problem in snapshot
/// coordinates.
struct EdgeSpectrum {
  int coarse_edge = -1;
  SpectralProblem problem = SpectralProblem::EdgeFlux;
  Mat a_form;        ///< l x l
  Mat s_form;        ///< l x l, after any regularization
  Vec eigenvalues;   ///< ascending
  Mat eigenvectors;  ///< l x l, s-orthonormal columns
  bool regularized = false;
};

EdgeSpectrum edge_spectrum(const GridHierarchy& grid, const PoroelasticMedium& medium, const EdgeSnapshots& snapshots,
                           SpectralProblem problem);

/// First `retained` modes of one coarse edge, expanded in fine coordinates
/// on the neighborhood.
struct EdgeOfflineBasis {
  int coarse_edge = -1;
  std::vector<int> support_edges;  ///< global fine edges of the neighborhood
  Vec eigenvalues;                 ///< retained, ascending
  Mat coefficients;                ///< l x J snapshot coefficients
  Mat fields;                      ///< support_edges x J
  bool regularized = false;
};

EdgeOfflineBasis truncate(const EdgeSpectrum& spectrum, const EdgeSnapshots& snapshots, int retained);

EdgeOfflineBasis spectral_reduce_1(const GridHierarchy& grid, const PoroelasticMedium& medium,
                                   const SnapshotSet& snapshots, int coarse_edge, int retained);
EdgeOfflineBasis spectral_reduce_2(const GridHierarchy& grid, const PoroelasticMedium& medium,
                                   const SnapshotSet& snapshots, int coarse_edge, int retained);

struct VelocityOfflineBasis {
  std::vector<EdgeOfflineBasis> edges;  ///< indexed by coarse edge
};

/// Spectra for every coarse edge (parallel over edges).
std::vector<EdgeSpectrum> all_edge_spectra(const GridHierarchy& grid, const PoroelasticMedium& medium,
                                           const SnapshotSet& snapshots, SpectralProblem problem);
VelocityOfflineBasis truncate_all(const std::vector<EdgeSpectrum>& spectra, const SnapshotSet& snapshots,
                                  int retained);

/// R_g with columns ordered edge by edge; columns of coarse edges lying on a
/// no-flux side are marked constrained.
Prolongation assemble_velocity_prolongation(const GridHierarchy& grid, const VelocityOfflineBasis& basis,
                                            const BoundarySpec& boundary);

/// Harmonic mean of the permeability across a fine edge (one-sided on the
/// domain boundary).
double edge_permeability(const GridHierarchy& grid, const PoroelasticMedium& medium, int fine_edge);

}  // namespace biotms
