#include "biotms/displacement_offline.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

#include "biotms/parallel.hpp"

namespace biotms {

int local_displacement_dim(const GridHierarchy& grid, int vertex) {
  return 2 * grid.vertex_neighborhood(vertex).nodes.size();
}

EigenPairs local_displacement_eig(const GridHierarchy& grid, const PoroelasticMedium& med, int vertex, int count,
                                  const EigenOptions& options) {
  if (med.n != grid.fine_per_side()) throw InvalidInput("local_displacement_eig: medium size does not match the grid");
  const Neighborhood nb = grid.vertex_neighborhood(vertex);
  const int dim = 2 * nb.nodes.size();
  if (count < 1 || count > dim) {
    throw InvalidInput("local_displacement_eig: J_u must be in [1, " + std::to_string(dim) + "]");
  }
  const auto& cells = nb.cells.globals();
  const SpMat stiffness = assemble_elasticity(grid, cells, &nb.nodes, med.lambda, med.mu);
  std::vector<double> weight(med.lambda.size());
  for (std::size_t c = 0; c < weight.size(); ++c) weight[c] = med.lambda[c] + 2.0 * med.mu[c];
  const SpMat mass = assemble_displacement_mass(grid, cells, &nb.nodes, weight);
  return smallest_eigenpairs(stiffness, mass, count, options);
}

namespace {

// Bilinear hat of a coarse vertex at a fine node, in integer node offsets so
// that it vanishes exactly on the far side of every neighboring block.
double hat(const GridHierarchy& grid, int vertex, int node) {
  const auto [I, J] = grid.coarse_vertex_ij(vertex);
  const auto [i, j] = grid.fine_node_ij(node);
  const int r = grid.ratio();
  const double wx = std::max(0, r - std::abs(i - I * r)) / static_cast<double>(r);
  const double wy = std::max(0, r - std::abs(j - J * r)) / static_cast<double>(r);
  return wx * wy;
}

/// Dirichlet elasticity solves on one coarse block for the hat data of its
/// four corners. Column 2 c + d holds the response to corner c (tensor
/// order) with the hat in displacement component d.
struct BlockPou {
  LocalIndexMap nodes;
  Mat values;  // 2 * nodes x 8
};

BlockPou solve_block_pou(const GridHierarchy& grid, const PoroelasticMedium& med, int coarse_cell) {
  const auto cells = grid.fine_cells_in(coarse_cell);
  std::vector<int> node_list;
  for (int c : cells)
    for (int v : grid.fine_cell_nodes(c)) node_list.push_back(v);
  BlockPou out;
  out.nodes = LocalIndexMap(std::move(node_list));
  const int nn = out.nodes.size();

  const auto [I, J] = grid.coarse_cell_ij(coarse_cell);
  const int r = grid.ratio();
  std::vector<char> on_boundary(static_cast<std::size_t>(nn));
  for (int l = 0; l < nn; ++l) {
    const auto [i, j] = grid.fine_node_ij(out.nodes.global(l));
    on_boundary[static_cast<std::size_t>(l)] = (i == I * r || i == (I + 1) * r || j == J * r || j == (J + 1) * r) ? 1 : 0;
  }

  const auto corners = grid.coarse_cell_vertices(coarse_cell);
  Mat data = Mat::Zero(2 * nn, 8);
  for (int l = 0; l < nn; ++l) {
    if (!on_boundary[static_cast<std::size_t>(l)]) continue;
    for (int c = 0; c < 4; ++c) {
      const double g = hat(grid, corners[static_cast<std::size_t>(c)], out.nodes.global(l));
      data(2 * l, 2 * c) = g;
      data(2 * l + 1, 2 * c + 1) = g;
    }
  }

  DofMask free(static_cast<std::size_t>(2 * nn));
  for (int l = 0; l < nn; ++l) free[static_cast<std::size_t>(2 * l)] = free[static_cast<std::size_t>(2 * l + 1)] = on_boundary[static_cast<std::size_t>(l)] ? 0 : 1;

  const SpMat A = assemble_elasticity(grid, cells, &out.nodes, med.lambda, med.mu);
  out.values = data;
  if (std::find(free.begin(), free.end(), 1) == free.end()) return out;  // one fine cell per block

  std::vector<int> interior;
  for (int d = 0; d < 2 * nn; ++d)
    if (free[static_cast<std::size_t>(d)]) interior.push_back(d);
  std::vector<int> pos(static_cast<std::size_t>(2 * nn), -1);
  for (std::size_t k = 0; k < interior.size(); ++k) pos[static_cast<std::size_t>(interior[k])] = static_cast<int>(k);

  const int ni = static_cast<int>(interior.size());
  std::vector<Triplet> trips;
  for (int col = 0; col < A.outerSize(); ++col) {
    for (SpMat::InnerIterator it(A, col); it; ++it) {
      const int rr = pos[static_cast<std::size_t>(it.row())];
      const int cc = pos[static_cast<std::size_t>(it.col())];
      if (rr >= 0 && cc >= 0) trips.emplace_back(rr, cc, it.value());
    }
  }
  SpMat A_ii(ni, ni);
  A_ii.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> llt(A_ii);
  if (llt.info() != Eigen::Success) throw SolverError("build_pou: block elasticity factorization failed");

  const Mat Ag = A * data;
  Mat rhs(ni, 8);
  for (int k = 0; k < ni; ++k) rhs.row(k) = -Ag.row(interior[static_cast<std::size_t>(k)]);
  const Mat sol = llt.solve(rhs);
  for (int k = 0; k < ni; ++k) out.values.row(interior[static_cast<std::size_t>(k)]) = sol.row(k);
  return out;
}

PartitionOfUnity gather_pou(const GridHierarchy& grid, int vertex, const std::vector<const BlockPou*>& blocks,
                            const std::vector<int>& block_cells) {
  const Neighborhood nb = grid.vertex_neighborhood(vertex);
  PartitionOfUnity pou;
  pou.vertex = vertex;
  pou.nodes = nb.nodes;
  const int nn = nb.nodes.size();
  pou.xi11 = Vec::Zero(nn);
  pou.xi12 = Vec::Zero(nn);
  pou.xi21 = Vec::Zero(nn);
  pou.xi22 = Vec::Zero(nn);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto corners = grid.coarse_cell_vertices(block_cells[b]);
    const auto it = std::find(corners.begin(), corners.end(), vertex);
    if (it == corners.end()) throw InvalidInput("build_pou: block does not touch the vertex");
    const int c = static_cast<int>(it - corners.begin());
    const BlockPou& bp = *blocks[b];
    for (int l = 0; l < bp.nodes.size(); ++l) {
      const int g = nb.nodes.local(bp.nodes.global(l));
      pou.xi11[g] = bp.values(2 * l, 2 * c);
      pou.xi12[g] = bp.values(2 * l + 1, 2 * c);
      pou.xi21[g] = bp.values(2 * l, 2 * c + 1);
      pou.xi22[g] = bp.values(2 * l + 1, 2 * c + 1);
    }
  }
  return pou;
}

}  // namespace

PartitionOfUnity build_pou(const GridHierarchy& grid, const PoroelasticMedium& med, int vertex) {
  if (vertex < 0 || vertex >= grid.num_coarse_vertices()) throw InvalidInput("build_pou: vertex out of range");
  if (med.n != grid.fine_per_side()) throw InvalidInput("build_pou: medium size does not match the grid");
  const Neighborhood nb = grid.vertex_neighborhood(vertex);
  std::vector<BlockPou> solved;
  solved.reserve(nb.coarse_cells.size());
  for (int K : nb.coarse_cells) solved.push_back(solve_block_pou(grid, med, K));
  std::vector<const BlockPou*> ptrs;
  for (const auto& s : solved) ptrs.push_back(&s);
  return gather_pou(grid, vertex, ptrs, nb.coarse_cells);
}

std::vector<PartitionOfUnity> build_all_pou(const GridHierarchy& grid, const PoroelasticMedium& med) {
  if (med.n != grid.fine_per_side()) throw InvalidInput("build_pou: medium size does not match the grid");
  std::vector<BlockPou> blocks(static_cast<std::size_t>(grid.num_coarse_cells()));
  parallel_for(grid.num_coarse_cells(), [&](int K) { blocks[static_cast<std::size_t>(K)] = solve_block_pou(grid, med, K); });

  std::vector<PartitionOfUnity> out(static_cast<std::size_t>(grid.num_coarse_vertices()));
  parallel_for(grid.num_coarse_vertices(), [&](int v) {
    const auto cells = grid.vertex_neighborhood(v).coarse_cells;
    std::vector<const BlockPou*> ptrs;
    for (int K : cells) ptrs.push_back(&blocks[static_cast<std::size_t>(K)]);
    out[static_cast<std::size_t>(v)] = gather_pou(grid, v, ptrs, cells);
  });
  return out;
}

Mat multiply_basis(const PartitionOfUnity& pou, const Mat& fields) {
  const int nn = pou.nodes.size();
  if (fields.rows() != 2 * nn) throw InvalidInput("multiply_basis: field size does not match the neighborhood");
  Mat out(fields.rows(), fields.cols());
  for (int l = 0; l < nn; ++l) {
    out.row(2 * l) = pou.xi11[l] * fields.row(2 * l);
    out.row(2 * l + 1) = pou.xi22[l] * fields.row(2 * l + 1);
  }
  return out;
}

std::vector<EigenPairs> all_displacement_eigenpairs(const GridHierarchy& grid, const PoroelasticMedium& med,
                                                    int count, const EigenOptions& options) {
  if (count < 1) throw InvalidInput("J_u must be positive");
  std::vector<EigenPairs> out(static_cast<std::size_t>(grid.num_coarse_vertices()));
  parallel_for(grid.num_coarse_vertices(), [&](int v) {
    const int k = std::min(count, local_displacement_dim(grid, v));
    out[static_cast<std::size_t>(v)] = local_displacement_eig(grid, med, v, k, options);
  });
  return out;
}

DisplacementOfflineBasis combine_displacement_basis(const std::vector<EigenPairs>& eigenpairs,
                                                    const std::vector<PartitionOfUnity>& pous, int retained) {
  if (eigenpairs.size() != pous.size()) throw InvalidInput("combine_displacement_basis: vertex counts differ");
  if (retained < 1) throw InvalidInput("J_u must be positive");
  DisplacementOfflineBasis basis;
  basis.vertices.resize(pous.size());
  for (std::size_t v = 0; v < pous.size(); ++v) {
    const EigenPairs& ep = eigenpairs[v];
    const int k = std::min<int>(retained, static_cast<int>(ep.values.size()));
    VertexBasis& vb = basis.vertices[v];
    vb.vertex = pous[v].vertex;
    vb.support_nodes = pous[v].nodes.globals();
    vb.eigenvalues = ep.values.head(k);
    vb.fields = multiply_basis(pous[v], ep.vectors.leftCols(k));
  }
  return basis;
}

DisplacementOfflineBasis build_displacement_basis(const GridHierarchy& grid, const PoroelasticMedium& med,
                                                  int retained, const EigenOptions& options) {
  return combine_displacement_basis(all_displacement_eigenpairs(grid, med, retained, options), build_all_pou(grid, med),
                                    retained);
}

Prolongation assemble_displacement_prolongation(const GridHierarchy& grid, const DisplacementOfflineBasis& basis) {
  std::vector<Triplet> trips;
  Prolongation P;
  int col = 0;
  for (const auto& vb : basis.vertices) {
    const bool constrained = grid.is_boundary_coarse_vertex(vb.vertex);
    for (int k = 0; k < vb.fields.cols(); ++k, ++col) {
      for (std::size_t l = 0; l < vb.support_nodes.size(); ++l) {
        for (int c = 0; c < 2; ++c) {
          const double v = vb.fields(static_cast<Eigen::Index>(2 * l + c), k);
          if (v != 0.0) trips.emplace_back(2 * vb.support_nodes[l] + c, col, v);
        }
      }
      P.column_free.push_back(constrained ? 0 : 1);
    }
  }
  P.R = SpMat(2 * grid.num_fine_nodes(), col);
  P.R.setFromTriplets(trips.begin(), trips.end());
  P.R.makeCompressed();
  return P;
}

CoarsePressureSpace build_coarse_pressure(const GridHierarchy& grid) {
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(grid.num_fine_cells()));
  for (int c = 0; c < grid.num_fine_cells(); ++c) trips.emplace_back(c, grid.coarse_cell_of(c), 1.0);
  CoarsePressureSpace space;
  space.R = SpMat(grid.num_fine_cells(), grid.num_coarse_cells());
  space.R.setFromTriplets(trips.begin(), trips.end());
  space.R.makeCompressed();
  return space;
}

Vec coarse_cell_average(const GridHierarchy& grid, const Vec& fine_pressure) {
  if (fine_pressure.size() != grid.num_fine_cells()) throw InvalidInput("coarse_cell_average: size mismatch");
  Vec out = Vec::Zero(grid.num_coarse_cells());
  for (int c = 0; c < grid.num_fine_cells(); ++c) out[grid.coarse_cell_of(c)] += fine_pressure[c];
  return out / static_cast<double>(grid.ratio() * grid.ratio());
}

}  // namespace biotms
