#pragma once

#include "biotms/fine_fem.hpp"
#include "biotms/local_eigen.hpp"

namespace biotms {

/// Dimension of the local displacement space on a vertex neighborhood
/// (two components per fine node of the closure).
int local_displacement_dim(const GridHierarchy& grid, int vertex);

/// Smallest `count` pairs of
///   int_w 2 mu eps(u):eps(v) + lambda div u div v = mu_k int_w (lambda + 2 mu) u.v
/// over all fine displacement DOFs of the neighborhood (free boundary).
/// Vectors are in the neighborhood's local DOF order 2 * local_node + c.
EigenPairs local_displacement_eig(const GridHierarchy& grid, const PoroelasticMedium& medium, int vertex, int count,
                                  const EigenOptions& options = {});

/// Elasticity-harmonic multipliers of one coarse vertex, given on the fine
/// nodes of its neighborhood. xi_1 = (xi11, xi12) has boundary data (g, 0) on
/// every coarse block boundary, xi_2 = (xi21, xi22) has (0, g), where g is
/// the bilinear hat of the vertex.
struct PartitionOfUnity {
  int vertex = -1;
  LocalIndexMap nodes;
  Vec xi11;
  Vec xi12;
  Vec xi21;
  Vec xi22;
};

PartitionOfUnity build_pou(const GridHierarchy& grid, const PoroelasticMedium& medium, int vertex);
/// All vertices at once; each coarse block is factorized a single time.
std::vector<PartitionOfUnity> build_all_pou(const GridHierarchy& grid, const PoroelasticMedium& medium);

/// Nodewise product (xi11 Phi_x, xi22 Phi_y) for each column of `fields`
/// (local DOF order of pou.nodes).
Mat multiply_basis(const PartitionOfUnity& pou, const Mat& fields);

struct VertexBasis {
  int vertex = -1;
  std::vector<int> support_nodes;  ///< global fine nodes of the neighborhood
  Vec eigenvalues;
  Mat fields;  ///< 2 * support_nodes x J_u products, local DOF order
};

struct DisplacementOfflineBasis {
  std::vector<VertexBasis> vertices;  ///< indexed by coarse vertex
};

/// Eigenpairs for every vertex (parallel over vertices). `count` is capped at
/// each neighborhood's local dimension.
std::vector<EigenPairs> all_displacement_eigenpairs(const GridHierarchy& grid, const PoroelasticMedium& medium,
                                                    int count, const EigenOptions& options = {});

/// Keeps the first `retained` pairs of each vertex (capped at what is
/// available) and multiplies by the partition of unity.
DisplacementOfflineBasis combine_displacement_basis(const std::vector<EigenPairs>& eigenpairs,
                                                    const std::vector<PartitionOfUnity>& pous, int retained);

DisplacementOfflineBasis build_displacement_basis(const GridHierarchy& grid, const PoroelasticMedium& medium,
                                                  int retained, const EigenOptions& options = {});

/// R_u, columns vertex by vertex; columns of boundary vertices are marked
/// constrained (u = 0 on the whole boundary).
Prolongation assemble_displacement_prolongation(const GridHierarchy& grid, const DisplacementOfflineBasis& basis);

/// Piecewise constants on the coarse cells.
struct CoarsePressureSpace {
  SpMat R;  ///< fine cells x coarse cells, 0/1 indicators

  [[nodiscard]] int num_columns() const { return static_cast<int>(R.cols()); }
};

CoarsePressureSpace build_coarse_pressure(const GridHierarchy& grid);

/// Coarse coefficients of the coarse-cell averages of a fine pressure.
Vec coarse_cell_average(const GridHierarchy& grid, const Vec& fine_pressure);

}  // namespace biotms
