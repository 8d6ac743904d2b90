#include "spr/graph.hpp"

#include <algorithm>
#include <string>

#include "spr/errors.hpp"

namespace spr {

std::vector<std::pair<int, int>> NeighborhoodGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j : adjacency[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

std::vector<int> NeighborhoodGraph::component_ids() const {
  std::vector<int> comp(n, -1);
  int next = 0;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int j : adjacency[i]) {
        if (comp[j] < 0) {
          comp[j] = next;
          stack.push_back(j);
        }
      }
    }
    ++next;
  }
  return comp;
}

int NeighborhoodGraph::n_components() const {
  const auto comp = component_ids();
  int k = 0;
  for (int c : comp) k = std::max(k, c + 1);
  return k;
}

std::vector<int> NeighborhoodGraph::isolated_nodes() const {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (adjacency[i].empty()) out.push_back(i);
  return out;
}

NeighborhoodGraph build_graph(int n, const std::vector<std::pair<int, int>>& edge_list) {
  if (n < 0) throw InputError("build_graph: negative node count");
  NeighborhoodGraph g;
  g.n = n;
  g.adjacency.assign(n, {});
  for (const auto& [a, b] : edge_list) {
    if (a == b)
      throw InputError("build_graph: self-loop at node " + std::to_string(a));
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw InputError("build_graph: edge (" + std::to_string(a) + "," +
                       std::to_string(b) + ") out of range for n=" + std::to_string(n));
    g.adjacency[a].push_back(b);
    g.adjacency[b].push_back(a);
  }
  for (auto& adj : g.adjacency) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return g;
}

NeighborhoodGraph grid_graph(int rows, int cols) {
  std::vector<std::pair<int, int>> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int i = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(i, i + 1);
      if (r + 1 < rows) edges.emplace_back(i, i + cols);
    }
  }
  return build_graph(rows * cols, edges);
}

NeighborhoodGraph path_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return build_graph(n, edges);
}

}  // namespace spr
