#include "biotms/grid.hpp"

#include <algorithm>
#include <string>

namespace biotms {

LocalIndexMap::LocalIndexMap(std::vector<int> globals) : to_global_(std::move(globals)) {
  std::sort(to_global_.begin(), to_global_.end());
  to_global_.erase(std::unique(to_global_.begin(), to_global_.end()), to_global_.end());
}

int LocalIndexMap::local(int global) const {
  const auto it = std::lower_bound(to_global_.begin(), to_global_.end(), global);
  if (it == to_global_.end() || *it != global) return -1;
  return static_cast<int>(it - to_global_.begin());
}

GridHierarchy::GridHierarchy(int coarse_cells_per_side, int fine_cells_per_side)
    : N_(coarse_cells_per_side), n_(fine_cells_per_side), r_(0) {
  if (N_ < 2) throw InvalidInput("grid: coarse cells per side must be >= 2, got " + std::to_string(N_));
  if (n_ < N_ || n_ % N_ != 0) {
    throw InvalidInput("grid: fine cells per side (" + std::to_string(n_) +
                       ") must be a positive multiple of the coarse count (" + std::to_string(N_) + ")");
  }
  r_ = n_ / N_;
}

EdgeAxis GridHierarchy::fine_edge_axis(int edge) const {
  return edge < n_ * (n_ + 1) ? EdgeAxis::Vertical : EdgeAxis::Horizontal;
}

std::array<int, 2> GridHierarchy::fine_edge_ij(int edge) const {
  if (edge < n_ * (n_ + 1)) return {edge % (n_ + 1), edge / (n_ + 1)};
  const int e = edge - n_ * (n_ + 1);
  return {e % n_, e / n_};
}

std::array<int, 4> GridHierarchy::fine_cell_nodes(int cell) const {
  const auto [i, j] = fine_cell_ij(cell);
  return {fine_node(i, j), fine_node(i + 1, j), fine_node(i, j + 1), fine_node(i + 1, j + 1)};
}

std::array<int, 4> GridHierarchy::fine_cell_edges(int cell) const {
  const auto [i, j] = fine_cell_ij(cell);
  return {fine_vertical_edge(i, j), fine_vertical_edge(i + 1, j), fine_horizontal_edge(i, j),
          fine_horizontal_edge(i, j + 1)};
}

std::array<int, 2> GridHierarchy::fine_edge_cells(int edge) const {
  const auto [i, j] = fine_edge_ij(edge);
  if (fine_edge_axis(edge) == EdgeAxis::Vertical) {
    return {i > 0 ? fine_cell(i - 1, j) : -1, i < n_ ? fine_cell(i, j) : -1};
  }
  return {j > 0 ? fine_cell(i, j - 1) : -1, j < n_ ? fine_cell(i, j) : -1};
}

Point GridHierarchy::fine_cell_center(int cell) const {
  const auto [i, j] = fine_cell_ij(cell);
  return {(i + 0.5) / n_, (j + 0.5) / n_};
}

Point GridHierarchy::fine_node_point(int node) const {
  const auto [i, j] = fine_node_ij(node);
  return {static_cast<double>(i) / n_, static_cast<double>(j) / n_};
}

bool GridHierarchy::is_boundary_fine_node(int node) const {
  const auto [i, j] = fine_node_ij(node);
  return i == 0 || j == 0 || i == n_ || j == n_;
}

bool GridHierarchy::is_boundary_fine_edge(int edge) const {
  const auto cells = fine_edge_cells(edge);
  return cells[0] < 0 || cells[1] < 0;
}

void GridHierarchy::check_coarse_edge(int edge) const {
  if (edge < 0 || edge >= num_coarse_edges()) {
    throw InvalidInput("grid: coarse edge index " + std::to_string(edge) + " out of range");
  }
}

EdgeAxis GridHierarchy::coarse_edge_axis(int edge) const {
  return edge < N_ * (N_ + 1) ? EdgeAxis::Vertical : EdgeAxis::Horizontal;
}

std::array<int, 2> GridHierarchy::coarse_edge_ij(int edge) const {
  if (edge < N_ * (N_ + 1)) return {edge % (N_ + 1), edge / (N_ + 1)};
  const int e = edge - N_ * (N_ + 1);
  return {e % N_, e / N_};
}

std::array<double, 2> GridHierarchy::coarse_edge_normal(int edge) const {
  return coarse_edge_axis(edge) == EdgeAxis::Vertical ? std::array<double, 2>{1.0, 0.0}
                                                      : std::array<double, 2>{0.0, 1.0};
}

bool GridHierarchy::is_boundary_coarse_edge(int edge) const {
  const auto [I, J] = coarse_edge_ij(edge);
  if (coarse_edge_axis(edge) == EdgeAxis::Vertical) return I == 0 || I == N_;
  return J == 0 || J == N_;
}

bool GridHierarchy::is_boundary_coarse_vertex(int vertex) const {
  const auto [I, J] = coarse_vertex_ij(vertex);
  return I == 0 || J == 0 || I == N_ || J == N_;
}

int GridHierarchy::coarse_cell_of(int fine) const {
  const auto [i, j] = fine_cell_ij(fine);
  return coarse_cell(i / r_, j / r_);
}

std::vector<int> GridHierarchy::fine_cells_in(int coarse) const {
  const auto [I, J] = coarse_cell_ij(coarse);
  std::vector<int> cells;
  cells.reserve(static_cast<std::size_t>(r_ * r_));
  for (int j = J * r_; j < (J + 1) * r_; ++j)
    for (int i = I * r_; i < (I + 1) * r_; ++i) cells.push_back(fine_cell(i, j));
  return cells;
}

std::array<int, 4> GridHierarchy::coarse_cell_vertices(int coarse) const {
  const auto [I, J] = coarse_cell_ij(coarse);
  return {coarse_vertex(I, J), coarse_vertex(I + 1, J), coarse_vertex(I, J + 1), coarse_vertex(I + 1, J + 1)};
}

std::array<int, 4> GridHierarchy::coarse_cell_edges(int coarse) const {
  const auto [I, J] = coarse_cell_ij(coarse);
  return {coarse_vertical_edge(I, J), coarse_vertical_edge(I + 1, J), coarse_horizontal_edge(I, J),
          coarse_horizontal_edge(I, J + 1)};
}

std::vector<int> GridHierarchy::fine_edges_on(int coarse_edge) const {
  check_coarse_edge(coarse_edge);
  const auto [I, J] = coarse_edge_ij(coarse_edge);
  std::vector<int> edges;
  edges.reserve(static_cast<std::size_t>(r_));
  for (int t = 0; t < r_; ++t) {
    edges.push_back(coarse_edge_axis(coarse_edge) == EdgeAxis::Vertical ? fine_vertical_edge(I * r_, J * r_ + t)
                                                                        : fine_horizontal_edge(I * r_ + t, J * r_));
  }
  return edges;
}

Neighborhood GridHierarchy::make_neighborhood(Neighborhood::Kind kind, int center,
                                              std::vector<int> coarse_cells) const {
  Neighborhood nb;
  nb.kind = kind;
  nb.center = center;
  std::sort(coarse_cells.begin(), coarse_cells.end());
  nb.coarse_cells = std::move(coarse_cells);

  std::vector<int> cells;
  std::vector<int> nodes;
  std::vector<int> edges;
  for (int K : nb.coarse_cells) {
    for (int c : fine_cells_in(K)) {
      cells.push_back(c);
      for (int v : fine_cell_nodes(c)) nodes.push_back(v);
      for (int e : fine_cell_edges(c)) edges.push_back(e);
    }
  }
  nb.cells = LocalIndexMap(std::move(cells));
  nb.nodes = LocalIndexMap(std::move(nodes));
  nb.edges = LocalIndexMap(std::move(edges));
  return nb;
}

Neighborhood GridHierarchy::vertex_neighborhood(int vertex) const {
  if (vertex < 0 || vertex >= num_coarse_vertices()) {
    throw InvalidInput("grid: coarse vertex index " + std::to_string(vertex) + " out of range");
  }
  const auto [I, J] = coarse_vertex_ij(vertex);
  std::vector<int> members;
  for (int dj = -1; dj <= 0; ++dj) {
    for (int di = -1; di <= 0; ++di) {
      const int ci = I + di;
      const int cj = J + dj;
      if (ci >= 0 && cj >= 0 && ci < N_ && cj < N_) members.push_back(coarse_cell(ci, cj));
    }
  }
  return make_neighborhood(Neighborhood::Kind::Vertex, vertex, std::move(members));
}

Neighborhood GridHierarchy::edge_neighborhood(int edge) const {
  check_coarse_edge(edge);
  const auto [I, J] = coarse_edge_ij(edge);
  std::vector<int> members;
  if (coarse_edge_axis(edge) == EdgeAxis::Vertical) {
    if (I > 0) members.push_back(coarse_cell(I - 1, J));
    if (I < N_) members.push_back(coarse_cell(I, J));
  } else {
    if (J > 0) members.push_back(coarse_cell(I, J - 1));
    if (J < N_) members.push_back(coarse_cell(I, J));
  }
  return make_neighborhood(Neighborhood::Kind::Edge, edge, std::move(members));
}

}  // namespace biotms
