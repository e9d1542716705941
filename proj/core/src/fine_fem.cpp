#include "biotms/fine_fem.hpp"

#include <array>
#include <cmath>

namespace biotms {

void BoundarySpec::validate() const {
  if ((pressure_sides & no_flux_sides) != 0u) throw InvalidInput("boundary spec: Gamma_1 and Gamma_2 overlap");
  if ((pressure_sides | no_flux_sides) != kAllSides) throw InvalidInput("boundary spec: sides not fully covered");
  if (((pressure_sides | no_flux_sides) & ~kAllSides) != 0u) throw InvalidInput("boundary spec: unknown side bits");
}

unsigned boundary_side_of_fine_edge(const GridHierarchy& grid, int edge) {
  const auto [i, j] = grid.fine_edge_ij(edge);
  const int n = grid.fine_per_side();
  if (grid.fine_edge_axis(edge) == EdgeAxis::Vertical) return i == 0 ? kLeft : (i == n ? kRight : 0u);
  return j == 0 ? kBottom : (j == n ? kTop : 0u);
}

unsigned boundary_side_of_coarse_edge(const GridHierarchy& grid, int edge) {
  const auto [I, J] = grid.coarse_edge_ij(edge);
  const int N = grid.coarse_per_side();
  if (grid.coarse_edge_axis(edge) == EdgeAxis::Vertical) return I == 0 ? kLeft : (I == N ? kRight : 0u);
  return J == 0 ? kBottom : (J == N ? kTop : 0u);
}

FineSpaces build_spaces(const GridHierarchy& grid, const BoundarySpec& boundary) {
  boundary.validate();
  FineSpaces spaces{grid, boundary, {}, {}};
  spaces.displacement_free.assign(static_cast<std::size_t>(spaces.num_displacement_dofs()), 1);
  for (int v = 0; v < grid.num_fine_nodes(); ++v) {
    if (grid.is_boundary_fine_node(v)) {
      spaces.displacement_free[static_cast<std::size_t>(2 * v)] = 0;
      spaces.displacement_free[static_cast<std::size_t>(2 * v + 1)] = 0;
    }
  }
  spaces.velocity_free.assign(static_cast<std::size_t>(spaces.num_velocity_dofs()), 1);
  for (int e = 0; e < grid.num_fine_edges(); ++e) {
    if ((boundary_side_of_fine_edge(grid, e) & boundary.no_flux_sides) != 0u) {
      spaces.velocity_free[static_cast<std::size_t>(e)] = 0;
    }
  }
  return spaces;
}

namespace {

// Reference Q1 element on [0,1]^2, local node a = ax + 2 ay.
struct ReferenceQ1 {
  std::array<std::array<double, 8>, 8> stiff_mu{};      // 2 eps:eps
  std::array<std::array<double, 8>, 8> stiff_lambda{};  // div div
  std::array<std::array<double, 4>, 4> mass{};
  std::array<std::array<double, 2>, 4> grad_integral{};  // int dN_a / dxi_c

  ReferenceQ1() {
    const double g = 0.5 / std::sqrt(3.0);
    const std::array<double, 2> pts{0.5 - g, 0.5 + g};
    for (double xi : pts) {
      for (double eta : pts) {
        const double w = 0.25;
        std::array<double, 4> N{};
        std::array<std::array<double, 2>, 4> dN{};
        for (int a = 0; a < 4; ++a) {
          const int ax = a % 2;
          const int ay = a / 2;
          const double fx = ax ? xi : 1.0 - xi;
          const double fy = ay ? eta : 1.0 - eta;
          N[a] = fx * fy;
          dN[a] = {(ax ? 1.0 : -1.0) * fy, fx * (ay ? 1.0 : -1.0)};
        }
        // Voigt strain rows for DOF 2a+c: (eps_xx, eps_yy, gamma_xy).
        std::array<std::array<double, 3>, 8> Bv{};
        for (int a = 0; a < 4; ++a) {
          Bv[2 * a] = {dN[a][0], 0.0, dN[a][1]};
          Bv[2 * a + 1] = {0.0, dN[a][1], dN[a][0]};
        }
        for (int p = 0; p < 8; ++p) {
          for (int q = 0; q < 8; ++q) {
            stiff_mu[p][q] += w * (2.0 * Bv[p][0] * Bv[q][0] + 2.0 * Bv[p][1] * Bv[q][1] + Bv[p][2] * Bv[q][2]);
            stiff_lambda[p][q] += w * (Bv[p][0] + Bv[p][1]) * (Bv[q][0] + Bv[q][1]);
          }
        }
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) mass[a][b] += w * N[a] * N[b];
          grad_integral[a][0] += w * dN[a][0];
          grad_integral[a][1] += w * dN[a][1];
        }
      }
    }
  }
};

const ReferenceQ1& reference_q1() {
  static const ReferenceQ1 ref;
  return ref;
}

int map_index(const LocalIndexMap* map, int global) {
  if (map == nullptr) return global;
  const int l = map->local(global);
  if (l < 0) throw InvalidInput("assembly: entity outside the local index map");
  return l;
}

SpMat from_triplets(int rows, int cols, const std::vector<Triplet>& trips) {
  SpMat m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

int node_count(const GridHierarchy& grid, const LocalIndexMap* nodes) {
  return nodes ? nodes->size() : grid.num_fine_nodes();
}
int edge_count(const GridHierarchy& grid, const LocalIndexMap* edges) {
  return edges ? edges->size() : grid.num_fine_edges();
}
int cell_count(const GridHierarchy& grid, const LocalIndexMap* cells) {
  return cells ? cells->size() : grid.num_fine_cells();
}

void check_coefficients(const GridHierarchy& grid, std::span<const double> coeff, const char* what) {
  if (static_cast<int>(coeff.size()) != grid.num_fine_cells()) {
    throw InvalidInput(std::string("assembly: ") + what + " has wrong length");
  }
}

}  // namespace

std::vector<int> all_fine_cells(const GridHierarchy& grid) {
  std::vector<int> cells(static_cast<std::size_t>(grid.num_fine_cells()));
  for (int c = 0; c < grid.num_fine_cells(); ++c) cells[static_cast<std::size_t>(c)] = c;
  return cells;
}

SpMat assemble_elasticity(const GridHierarchy& grid, std::span<const int> cells, const LocalIndexMap* nodes,
                          std::span<const double> lambda, std::span<const double> mu) {
  check_coefficients(grid, lambda, "lambda");
  check_coefficients(grid, mu, "mu");
  const auto& ref = reference_q1();
  std::vector<Triplet> trips;
  trips.reserve(cells.size() * 64);
  for (int c : cells) {
    const auto vs = grid.fine_cell_nodes(c);
    std::array<int, 8> dof{};
    for (int a = 0; a < 4; ++a) {
      const int v = map_index(nodes, vs[static_cast<std::size_t>(a)]);
      dof[2 * a] = 2 * v;
      dof[2 * a + 1] = 2 * v + 1;
    }
    const double lc = lambda[static_cast<std::size_t>(c)];
    const double mc = mu[static_cast<std::size_t>(c)];
    for (int p = 0; p < 8; ++p)
      for (int q = 0; q < 8; ++q)
        trips.emplace_back(dof[p], dof[q], mc * ref.stiff_mu[p][q] + lc * ref.stiff_lambda[p][q]);
  }
  const int size = 2 * node_count(grid, nodes);
  return from_triplets(size, size, trips);
}

SpMat assemble_displacement_mass(const GridHierarchy& grid, std::span<const int> cells, const LocalIndexMap* nodes,
                                 std::span<const double> weight) {
  check_coefficients(grid, weight, "weight");
  const auto& ref = reference_q1();
  const double area = grid.fine_size() * grid.fine_size();
  std::vector<Triplet> trips;
  trips.reserve(cells.size() * 32);
  for (int c : cells) {
    const auto vs = grid.fine_cell_nodes(c);
    const double w = weight[static_cast<std::size_t>(c)] * area;
    for (int a = 0; a < 4; ++a) {
      const int va = map_index(nodes, vs[static_cast<std::size_t>(a)]);
      for (int b = 0; b < 4; ++b) {
        const int vb = map_index(nodes, vs[static_cast<std::size_t>(b)]);
        trips.emplace_back(2 * va, 2 * vb, w * ref.mass[a][b]);
        trips.emplace_back(2 * va + 1, 2 * vb + 1, w * ref.mass[a][b]);
      }
    }
  }
  const int size = 2 * node_count(grid, nodes);
  return from_triplets(size, size, trips);
}

SpMat assemble_velocity_mass(const GridHierarchy& grid, std::span<const int> cells, const LocalIndexMap* edges,
                             std::span<const double> weight) {
  check_coefficients(grid, weight, "weight");
  const double area = grid.fine_size() * grid.fine_size();
  std::vector<Triplet> trips;
  trips.reserve(cells.size() * 8);
  for (int c : cells) {
    const auto es = grid.fine_cell_edges(c);
    const double w = weight[static_cast<std::size_t>(c)] * area;
    // Left/right shapes (1-xi, 0), (xi, 0); bottom/top (0, 1-eta), (0, eta).
    for (int pair = 0; pair < 2; ++pair) {
      const int lo = map_index(edges, es[static_cast<std::size_t>(2 * pair)]);
      const int hi = map_index(edges, es[static_cast<std::size_t>(2 * pair + 1)]);
      trips.emplace_back(lo, lo, w / 3.0);
      trips.emplace_back(hi, hi, w / 3.0);
      trips.emplace_back(lo, hi, w / 6.0);
      trips.emplace_back(hi, lo, w / 6.0);
    }
  }
  const int size = edge_count(grid, edges);
  return from_triplets(size, size, trips);
}

SpMat assemble_divergence(const GridHierarchy& grid, std::span<const int> cells, const LocalIndexMap* cell_map,
                          const LocalIndexMap* edges) {
  const double h = grid.fine_size();
  std::vector<Triplet> trips;
  trips.reserve(cells.size() * 4);
  for (int c : cells) {
    const auto es = grid.fine_cell_edges(c);
    const int row = map_index(cell_map, c);
    trips.emplace_back(row, map_index(edges, es[0]), -h);
    trips.emplace_back(row, map_index(edges, es[1]), h);
    trips.emplace_back(row, map_index(edges, es[2]), -h);
    trips.emplace_back(row, map_index(edges, es[3]), h);
  }
  return from_triplets(cell_count(grid, cell_map), edge_count(grid, edges), trips);
}

SpMat assemble_displacement_divergence(const GridHierarchy& grid, std::span<const int> cells,
                                       const LocalIndexMap* nodes, const LocalIndexMap* cell_map) {
  const auto& ref = reference_q1();
  const double h = grid.fine_size();
  std::vector<Triplet> trips;
  trips.reserve(cells.size() * 8);
  for (int c : cells) {
    const auto vs = grid.fine_cell_nodes(c);
    const int col = map_index(cell_map, c);
    for (int a = 0; a < 4; ++a) {
      const int v = map_index(nodes, vs[static_cast<std::size_t>(a)]);
      trips.emplace_back(2 * v, col, h * ref.grad_integral[a][0]);
      trips.emplace_back(2 * v + 1, col, h * ref.grad_integral[a][1]);
    }
  }
  return from_triplets(2 * node_count(grid, nodes), cell_count(grid, cell_map), trips);
}

OperatorSet assemble_operators(const FineSpaces& spaces, const PoroelasticMedium& med) {
  const GridHierarchy& grid = spaces.grid;
  if (med.n != grid.fine_per_side() || static_cast<int>(med.kappa.size()) != grid.num_fine_cells()) {
    throw InvalidInput("assemble_operators: medium size does not match the fine grid");
  }
  const auto cells = all_fine_cells(grid);
  const double area = grid.fine_size() * grid.fine_size();

  OperatorSet ops;
  ops.A = assemble_elasticity(grid, cells, nullptr, med.lambda, med.mu);
  ops.B = med.alpha * assemble_displacement_divergence(grid, cells, nullptr, nullptr);
  ops.C = SpMat(ops.B.transpose());

  std::vector<Triplet> dtrips;
  dtrips.reserve(cells.size());
  for (int c : cells) dtrips.emplace_back(c, c, area / med.biot_modulus[static_cast<std::size_t>(c)]);
  ops.D = from_triplets(grid.num_fine_cells(), grid.num_fine_cells(), dtrips);

  ops.E = assemble_divergence(grid, cells, nullptr, nullptr);
  ops.K = SpMat(ops.E.transpose());

  std::vector<double> inv_perm(med.kappa.size());
  for (std::size_t c = 0; c < inv_perm.size(); ++c) inv_perm[c] = med.viscosity / med.kappa[c];
  ops.J = assemble_velocity_mass(grid, cells, nullptr, inv_perm);
  return ops;
}

Vec assemble_load(const GridHierarchy& grid, const SourceFunction& source, double t) {
  Vec F(grid.num_fine_cells());
  const double area = grid.fine_size() * grid.fine_size();
  for (int c = 0; c < grid.num_fine_cells(); ++c) F[c] = source(grid.fine_cell_center(c), t) * area;
  return F;
}

double energy_norm(const Vec& u, const SpMat& A) {
  if (u.size() != A.rows()) throw InvalidInput("energy_norm: size mismatch");
  const double q = u.dot(A * u);
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

}  // namespace biotms
