#pragma once

#include <utility>
#include <vector>

namespace spr {

// Undirected neighbourhood structure of the areas. Adjacency lists are
// sorted, symmetric and free of self-loops; the ICAR precision matrix
// (degree on the diagonal, -1 for each neighbour pair) is represented
// implicitly by this structure.
struct NeighborhoodGraph {
  int n = 0;
  std::vector<std::vector<int>> adjacency;

  int degree(int i) const { return static_cast<int>(adjacency[i].size()); }

  // Unique undirected edges with i < j.
  std::vector<std::pair<int, int>> edges() const;

  // Connected-component id per node; isolated nodes are their own component.
  std::vector<int> component_ids() const;
  int n_components() const;

  // Rank of the ICAR precision matrix: n minus the number of components.
  int icar_rank() const { return n - n_components(); }

  std::vector<int> isolated_nodes() const;
};

// Builds a symmetrised, de-duplicated graph from an edge list.
// Throws InputError on self-loops or out-of-range indices. Isolated nodes
// are permitted; callers can query them via isolated_nodes().
NeighborhoodGraph build_graph(int n, const std::vector<std::pair<int, int>>& edge_list);

// rows x cols grid with rook adjacency; node index = row * cols + col.
NeighborhoodGraph grid_graph(int rows, int cols);

// 0-1-2-...-(n-1) chain.
NeighborhoodGraph path_graph(int n);

}  // namespace spr
