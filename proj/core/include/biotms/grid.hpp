#pragma once

#include <array>
#include <vector>

#include "biotms/types.hpp"

namespace biotms {

/// Orientation of a grid edge. Vertical edges carry the normal +x,
/// horizontal edges carry +y; the choice is global and never flipped.
enum class EdgeAxis { Vertical, Horizontal };

/// Sorted local <-> global index translation for a subset of entities.
class LocalIndexMap {
 public:
  LocalIndexMap() = default;
  explicit LocalIndexMap(std::vector<int> globals);  // sorts and deduplicates

  [[nodiscard]] int size() const { return static_cast<int>(to_global_.size()); }
  [[nodiscard]] int global(int local) const { return to_global_[static_cast<std::size_t>(local)]; }
  /// Local index of a global entity, or -1 when it is not a member.
  [[nodiscard]] int local(int global) const;
  [[nodiscard]] bool contains(int global) const { return local(global) >= 0; }
  [[nodiscard]] const std::vector<int>& globals() const { return to_global_; }

 private:
  std::vector<int> to_global_;
};

/// Union of coarse cells around a coarse vertex or a coarse edge, together
/// with the fine entities it covers (closure of the member cells).
struct Neighborhood {
  enum class Kind { Vertex, Edge };

  Kind kind = Kind::Vertex;
  int center = -1;                ///< coarse vertex or coarse edge index
  std::vector<int> coarse_cells;  ///< ascending
  LocalIndexMap cells;            ///< fine cells
  LocalIndexMap nodes;            ///< fine nodes
  LocalIndexMap edges;            ///< fine edges
};

/// Nested uniform coarse (N x N) and fine (n x n) grids on the unit square.
///
/// All entity sets are indexed row-major with x running fastest. Edges are
/// numbered vertical first, `i + j (m + 1)` for the vertical edge at x-index
/// i and row j, then horizontal, `m (m + 1) + i + j m`, where m is the number
/// of cells per side. The same scheme is used for both levels.
class GridHierarchy {
 public:
  GridHierarchy(int coarse_cells_per_side, int fine_cells_per_side);

  [[nodiscard]] int coarse_per_side() const { return N_; }
  [[nodiscard]] int fine_per_side() const { return n_; }
  /// Fine cells per coarse cell along one side (l_i for every coarse edge).
  [[nodiscard]] int ratio() const { return r_; }
  [[nodiscard]] double fine_size() const { return 1.0 / n_; }
  [[nodiscard]] double coarse_size() const { return 1.0 / N_; }

  [[nodiscard]] int num_coarse_cells() const { return N_ * N_; }
  [[nodiscard]] int num_coarse_vertices() const { return (N_ + 1) * (N_ + 1); }
  [[nodiscard]] int num_coarse_edges() const { return 2 * N_ * (N_ + 1); }
  [[nodiscard]] int num_fine_cells() const { return n_ * n_; }
  [[nodiscard]] int num_fine_nodes() const { return (n_ + 1) * (n_ + 1); }
  [[nodiscard]] int num_fine_edges() const { return 2 * n_ * (n_ + 1); }

  // Fine entities.
  [[nodiscard]] int fine_cell(int i, int j) const { return i + j * n_; }
  [[nodiscard]] int fine_node(int i, int j) const { return i + j * (n_ + 1); }
  [[nodiscard]] int fine_vertical_edge(int i, int j) const { return i + j * (n_ + 1); }
  [[nodiscard]] int fine_horizontal_edge(int i, int j) const { return n_ * (n_ + 1) + i + j * n_; }
  [[nodiscard]] std::array<int, 2> fine_cell_ij(int cell) const { return {cell % n_, cell / n_}; }
  [[nodiscard]] std::array<int, 2> fine_node_ij(int node) const { return {node % (n_ + 1), node / (n_ + 1)}; }
  [[nodiscard]] EdgeAxis fine_edge_axis(int edge) const;
  /// (i, j) of a fine edge in the indexing of its axis.
  [[nodiscard]] std::array<int, 2> fine_edge_ij(int edge) const;
  /// Nodes of a fine cell in tensor order: (0,0), (1,0), (0,1), (1,1).
  [[nodiscard]] std::array<int, 4> fine_cell_nodes(int cell) const;
  /// Edges of a fine cell: left, right, bottom, top.
  [[nodiscard]] std::array<int, 4> fine_cell_edges(int cell) const;
  /// The one or two fine cells sharing a fine edge (-1 outside the domain);
  /// first entry lies on the negative side of the edge normal.
  [[nodiscard]] std::array<int, 2> fine_edge_cells(int edge) const;
  [[nodiscard]] Point fine_cell_center(int cell) const;
  [[nodiscard]] Point fine_node_point(int node) const;
  [[nodiscard]] bool is_boundary_fine_node(int node) const;
  [[nodiscard]] bool is_boundary_fine_edge(int edge) const;

  // Coarse entities.
  [[nodiscard]] int coarse_cell(int I, int J) const { return I + J * N_; }
  [[nodiscard]] int coarse_vertex(int I, int J) const { return I + J * (N_ + 1); }
  [[nodiscard]] int coarse_vertical_edge(int I, int J) const { return I + J * (N_ + 1); }
  [[nodiscard]] int coarse_horizontal_edge(int I, int J) const { return N_ * (N_ + 1) + I + J * N_; }
  [[nodiscard]] std::array<int, 2> coarse_cell_ij(int cell) const { return {cell % N_, cell / N_}; }
  [[nodiscard]] std::array<int, 2> coarse_vertex_ij(int vertex) const { return {vertex % (N_ + 1), vertex / (N_ + 1)}; }
  [[nodiscard]] EdgeAxis coarse_edge_axis(int edge) const;
  [[nodiscard]] std::array<int, 2> coarse_edge_ij(int edge) const;
  /// Fixed unit normal m_i of a coarse edge.
  [[nodiscard]] std::array<double, 2> coarse_edge_normal(int edge) const;
  [[nodiscard]] bool is_boundary_coarse_edge(int edge) const;
  [[nodiscard]] bool is_boundary_coarse_vertex(int vertex) const;
  /// Coarse cell containing a fine cell.
  [[nodiscard]] int coarse_cell_of(int fine_cell) const;
  /// Fine cells of a coarse cell, row-major.
  [[nodiscard]] std::vector<int> fine_cells_in(int coarse_cell) const;
  /// Coarse vertices of a coarse cell in tensor order.
  [[nodiscard]] std::array<int, 4> coarse_cell_vertices(int coarse_cell) const;
  /// Coarse edges of a coarse cell: left, right, bottom, top.
  [[nodiscard]] std::array<int, 4> coarse_cell_edges(int coarse_cell) const;

  /// Fine edges composing coarse edge i, ordered along the edge tangent.
  [[nodiscard]] std::vector<int> fine_edges_on(int coarse_edge) const;
  [[nodiscard]] Neighborhood vertex_neighborhood(int vertex) const;
  [[nodiscard]] Neighborhood edge_neighborhood(int edge) const;
  /// Neighborhood data for an arbitrary set of coarse cells.
  [[nodiscard]] Neighborhood make_neighborhood(Neighborhood::Kind kind, int center,
                                               std::vector<int> coarse_cells) const;

 private:
  void check_coarse_edge(int edge) const;

  int N_;
  int n_;
  int r_;
};

}  // namespace biotms
