#include <gtest/gtest.h>

#include <set>

#include "biotms/grid.hpp"

using biotms::GridHierarchy;
using biotms::InvalidInput;
using biotms::Neighborhood;

TEST(Grid, Counts) {
  const GridHierarchy g(2, 8);
  EXPECT_EQ(g.num_coarse_edges(), 12);
  EXPECT_EQ(g.num_coarse_vertices(), 9);
  EXPECT_EQ(g.ratio(), 4);
  for (int e = 0; e < g.num_coarse_edges(); ++e) EXPECT_EQ(g.fine_edges_on(e).size(), 4u);

  const GridHierarchy paper(10, 200);
  EXPECT_EQ(paper.ratio(), 20);
  EXPECT_EQ(paper.fine_cells_in(37).size(), 400u);
  EXPECT_EQ(paper.fine_edges_on(55).size(), 20u);
}

TEST(Grid, DegenerateRefinement) {
  const GridHierarchy g(2, 2);
  EXPECT_EQ(g.ratio(), 1);
  for (int e = 0; e < g.num_coarse_edges(); ++e) {
    const auto fine = g.fine_edges_on(e);
    ASSERT_EQ(fine.size(), 1u);
    EXPECT_EQ(fine[0], e);
  }
}

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(GridHierarchy(1, 4), InvalidInput);
  EXPECT_THROW(GridHierarchy(3, 8), InvalidInput);
  EXPECT_THROW(GridHierarchy(4, 2), InvalidInput);
  const GridHierarchy g(2, 4);
  EXPECT_THROW((void)g.fine_edges_on(12), InvalidInput);
  EXPECT_THROW((void)g.vertex_neighborhood(-1), InvalidInput);
}

TEST(Grid, Indexing) {
  const GridHierarchy g(2, 4);
  EXPECT_EQ(g.fine_cell(1, 2), 9);
  EXPECT_EQ(g.fine_node(1, 2), 11);
  EXPECT_EQ(g.fine_vertical_edge(1, 2), 11);
  EXPECT_EQ(g.fine_horizontal_edge(1, 2), 20 + 9);
  const auto nodes = g.fine_cell_nodes(g.fine_cell(1, 2));
  EXPECT_EQ(nodes, (std::array<int, 4>{11, 12, 16, 17}));
  const auto edges = g.fine_cell_edges(g.fine_cell(1, 2));
  EXPECT_EQ(edges, (std::array<int, 4>{11, 12, 29, 33}));
  // Negative side of the normal first.
  EXPECT_EQ(g.fine_edge_cells(12), (std::array<int, 2>{9, 10}));
  EXPECT_EQ(g.fine_edge_cells(g.fine_horizontal_edge(1, 2)), (std::array<int, 2>{5, 9}));
  EXPECT_EQ(g.fine_edge_cells(g.fine_vertical_edge(0, 0)), (std::array<int, 2>{-1, 0}));
  EXPECT_EQ(g.coarse_cell_of(g.fine_cell(3, 1)), 1);
  EXPECT_TRUE(g.is_boundary_fine_edge(g.fine_horizontal_edge(2, 4)));
  EXPECT_FALSE(g.is_boundary_fine_node(g.fine_node(2, 2)));
}

TEST(Grid, VertexNeighborhoods) {
  const GridHierarchy g(3, 6);
  EXPECT_EQ(g.vertex_neighborhood(g.coarse_vertex(1, 1)).coarse_cells.size(), 4u);
  EXPECT_EQ(g.vertex_neighborhood(g.coarse_vertex(0, 0)).coarse_cells.size(), 1u);
  EXPECT_EQ(g.vertex_neighborhood(g.coarse_vertex(1, 0)).coarse_cells.size(), 2u);
  const Neighborhood nb = g.vertex_neighborhood(g.coarse_vertex(1, 1));
  EXPECT_EQ(nb.cells.size(), 16);
  EXPECT_EQ(nb.nodes.size(), 25);
  EXPECT_EQ(nb.edges.size(), 40);
}

TEST(Grid, EdgeNeighborhoods) {
  const GridHierarchy g(2, 4);
  int interior = 0;
  for (int e = 0; e < g.num_coarse_edges(); ++e) {
    const auto nb = g.edge_neighborhood(e);
    if (g.is_boundary_coarse_edge(e)) {
      EXPECT_EQ(nb.coarse_cells.size(), 1u);
    } else {
      EXPECT_EQ(nb.coarse_cells.size(), 2u);
      ++interior;
    }
  }
  EXPECT_EQ(interior, 4);
  const auto nb = g.edge_neighborhood(g.coarse_vertical_edge(1, 0));
  EXPECT_EQ(nb.coarse_cells, (std::vector<int>{0, 1}));
}

TEST(Grid, FineEdgesOrderedAlongTangent) {
  const GridHierarchy g(2, 8);
  for (int e = 0; e < g.num_coarse_edges(); ++e) {
    const auto fine = g.fine_edges_on(e);
    for (std::size_t k = 1; k < fine.size(); ++k) {
      const auto a = g.fine_edge_ij(fine[k - 1]);
      const auto b = g.fine_edge_ij(fine[k]);
      const int axis = g.coarse_edge_axis(e) == biotms::EdgeAxis::Vertical ? 1 : 0;
      EXPECT_EQ(b[axis], a[axis] + 1);
    }
  }
  EXPECT_EQ(GridHierarchy(4, 4).fine_edges_on(3).size(), 1u);
}

TEST(Grid, LocalIndexMap) {
  const biotms::LocalIndexMap m({7, 3, 3, 11});
  EXPECT_EQ(m.size(), 3);
  EXPECT_EQ(m.global(0), 3);
  EXPECT_EQ(m.local(11), 2);
  EXPECT_EQ(m.local(4), -1);
}
