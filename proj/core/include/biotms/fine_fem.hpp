#pragma once

#include <functional>
#include <span>

#include "biotms/grid.hpp"
#include "biotms/medium.hpp"

namespace biotms {

enum Side : unsigned { kLeft = 1u, kRight = 2u, kBottom = 4u, kTop = 8u };
inline constexpr unsigned kAllSides = kLeft | kRight | kBottom | kTop;

/// Partition of the boundary into Gamma_1 (p = 0, u = 0) and Gamma_2
/// (g.n = 0, u = 0), one bit per side of the unit square.
struct BoundarySpec {
  unsigned pressure_sides = 0;  ///< Gamma_1
  unsigned no_flux_sides = 0;   ///< Gamma_2

  /// Throws unless the two sets are disjoint and cover all four sides.
  void validate() const;

  static BoundarySpec flux_free() { return {0u, kAllSides}; }      // model 1
  static BoundarySpec pressure_fixed() { return {kAllSides, 0u}; }  // model 2
};

/// Sides of the unit square a coarse or fine boundary edge lies on (0 if interior).
unsigned boundary_side_of_fine_edge(const GridHierarchy& grid, int edge);
unsigned boundary_side_of_coarse_edge(const GridHierarchy& grid, int edge);

/// Discrete spaces on the fine grid: vector Q1 displacement (DOF 2*node+c),
/// lowest-order Raviart-Thomas velocity (one normal component per edge in
/// the global edge orientation), piecewise-constant pressure.
struct FineSpaces {
  GridHierarchy grid;
  BoundarySpec boundary;
  DofMask displacement_free;
  DofMask velocity_free;

  [[nodiscard]] int num_displacement_dofs() const { return 2 * grid.num_fine_nodes(); }
  [[nodiscard]] int num_velocity_dofs() const { return grid.num_fine_edges(); }
  [[nodiscard]] int num_pressure_dofs() const { return grid.num_fine_cells(); }
};

FineSpaces build_spaces(const GridHierarchy& grid, const BoundarySpec& boundary);

/// Matrices of the bilinear forms, unconstrained (masks not applied).
///   A  (nu x nu)  a(u, v)     = int sigma(u) : eps(v)
///   B  (nu x np)  b(v, p)     = int alpha div(v) p
///   C  (np x nu)  c(q, v)     = int alpha q div(v)
///   D  (np x np)  d(q, p)     = int q p / M
///   E  (np x ng)  e(q, g)     = int q div(g)
///   J  (ng x ng)  j(z, g)     = int (nu / kappa) z . g
///   K  (ng x np)  k(z, p)     = int div(z) p
struct OperatorSet {
  SpMat A;
  SpMat B;
  SpMat C;
  SpMat D;
  SpMat E;
  SpMat J;
  SpMat K;

  [[nodiscard]] int num_displacement() const { return static_cast<int>(A.rows()); }
  [[nodiscard]] int num_velocity() const { return static_cast<int>(J.rows()); }
  [[nodiscard]] int num_pressure() const { return static_cast<int>(D.rows()); }
};

OperatorSet assemble_operators(const FineSpaces& spaces, const PoroelasticMedium& medium);

using SourceFunction = std::function<double(Point, double)>;

/// Load vector f(q) for a source that is constant on each fine cell, sampled
/// at cell centers at time t.
Vec assemble_load(const GridHierarchy& grid, const SourceFunction& source, double t);

/// sqrt(u^T A u), clamped at zero.
double energy_norm(const Vec& u, const SpMat& A);

// Building blocks shared with the local (neighborhood) problems. `cells` are
// global fine cells; a null map means global numbering. Coefficient spans are
// indexed by global fine cell.

/// 2 mu eps:eps + lambda div div, exact for cellwise-constant coefficients.
SpMat assemble_elasticity(const GridHierarchy& grid, std::span<const int> cells, const LocalIndexMap* nodes,
                          std::span<const double> lambda, std::span<const double> mu);
/// int w u.v on the vector Q1 space.
SpMat assemble_displacement_mass(const GridHierarchy& grid, std::span<const int> cells, const LocalIndexMap* nodes,
                                 std::span<const double> weight);
/// int w z.g on the face-element space.
SpMat assemble_velocity_mass(const GridHierarchy& grid, std::span<const int> cells, const LocalIndexMap* edges,
                             std::span<const double> weight);
/// int q div(g), rows = cells (local order of `cell_map`), cols = edges.
SpMat assemble_divergence(const GridHierarchy& grid, std::span<const int> cells, const LocalIndexMap* cell_map,
                          const LocalIndexMap* edges);
/// int div(v) q for the vector Q1 space, rows = displacement DOFs, cols = cells.
SpMat assemble_displacement_divergence(const GridHierarchy& grid, std::span<const int> cells,
                                       const LocalIndexMap* nodes, const LocalIndexMap* cell_map);

/// All fine cells 0..n^2-1.
std::vector<int> all_fine_cells(const GridHierarchy& grid);

}  // namespace biotms
