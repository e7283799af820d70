#include "bearing/graph.hpp"

#include <algorithm>
#include <string>

#include "bearing/errors.hpp"

namespace bearing {

Graph::Graph(int n, std::span<const std::pair<int, int>> edge_list) : n_(n) {
  if (n < 1) throw InputError("graph needs at least one vertex, got n = " + std::to_string(n));
  adjacency_.resize(static_cast<std::size_t>(n));
  for (const auto& [a, b] : edge_list) {
    if (a < 0 || a >= n || b < 0 || b >= n) {
      throw InputError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") references a vertex outside [0, " + std::to_string(n) + ")");
    }
    if (a == b) throw InputError("self-loop at vertex " + std::to_string(a));
    Edge e{std::min(a, b), std::max(a, b)};
    if (!index_.emplace(e, num_edges()).second) continue;
    edges_.push_back(e);
    adjacency_[e.first].push_back(e.second);
    adjacency_[e.second].push_back(e.first);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

Graph::Graph(int n, std::initializer_list<std::pair<int, int>> edge_list)
    : Graph(n, std::span<const std::pair<int, int>>(edge_list.begin(), edge_list.size())) {}

std::optional<int> Graph::edge_index(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || i == j) return std::nullopt;
  const auto it = index_.find(Edge{std::min(i, j), std::max(i, j)});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Graph::is_connected() const {
  std::vector<char> seen(static_cast<std::size_t>(n_), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == n_;
}

Eigen::MatrixXd incidence_matrix(const Graph& g) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(g.num_edges(), g.num_vertices());
  for (int k = 0; k < g.num_edges(); ++k) {
    h(k, g.edges()[k].first) = -1.0;
    h(k, g.edges()[k].second) = 1.0;
  }
  return h;
}

namespace {

std::vector<std::pair<int, int>> edge_pairs(const Graph& g) {
  std::vector<std::pair<int, int>> out;
  out.reserve(g.edges().size() + 3);
  for (const auto& e : g.edges()) out.emplace_back(e.first, e.second);
  return out;
}

void require_vertex(const Graph& g, int v) {
  if (v < 0 || v >= g.num_vertices()) {
    throw InputError("vertex " + std::to_string(v) + " does not exist");
  }
}

}  // namespace

Graph henneberg_vertex_addition(const Graph& g, int i, int j) {
  require_vertex(g, i);
  require_vertex(g, j);
  if (i == j) throw InputError("vertex addition needs two distinct vertices");
  const int v = g.num_vertices();
  auto pairs = edge_pairs(g);
  pairs.emplace_back(v, i);
  pairs.emplace_back(v, j);
  return Graph(v + 1, pairs);
}

Graph henneberg_edge_splitting(const Graph& g, int i, int j, int k) {
  require_vertex(g, i);
  require_vertex(g, j);
  require_vertex(g, k);
  if (!g.has_edge(i, j)) {
    throw InputError("edge {" + std::to_string(i) + ", " + std::to_string(j) + "} does not exist");
  }
  if (k == i || k == j) throw InputError("edge splitting needs a third vertex distinct from i and j");
  const int v = g.num_vertices();
  const Edge removed{std::min(i, j), std::max(i, j)};
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(g.edges().size() + 2);
  for (const auto& e : g.edges()) {
    if (e != removed) pairs.emplace_back(e.first, e.second);
  }
  pairs.emplace_back(v, i);
  pairs.emplace_back(v, j);
  pairs.emplace_back(v, k);
  return Graph(v + 1, pairs);
}

Graph random_henneberg_graph(int n, std::mt19937_64& rng) {
  if (n < 2) throw InputError("Henneberg construction needs n >= 2");
  Graph g(2, {{0, 1}});
  while (g.num_vertices() < n) {
    const int size = g.num_vertices();
    const bool can_split = size >= 3;
    const bool split = can_split && std::uniform_int_distribution<int>(0, 1)(rng) == 1;
    if (split) {
      const int k_edge = std::uniform_int_distribution<int>(0, g.num_edges() - 1)(rng);
      const Edge e = g.edges()[k_edge];
      // Uniform over the size - 2 vertices outside the split edge.
      int k = std::uniform_int_distribution<int>(0, size - 3)(rng);
      for (int skip : {e.first, e.second}) {
        if (k >= skip) ++k;
      }
      g = henneberg_edge_splitting(g, e.first, e.second, k);
    } else {
      const int i = std::uniform_int_distribution<int>(0, size - 1)(rng);
      int j = std::uniform_int_distribution<int>(0, size - 2)(rng);
      if (j >= i) ++j;
      g = henneberg_vertex_addition(g, i, j);
    }
  }
  return g;
}

Graph augment_anchors(const Graph& g, std::span<const int> anchors) {
  if (anchors.size() < 2) throw InputError("anchor augmentation needs at least two anchors");
  for (int a : anchors) require_vertex(g, a);
  auto pairs = edge_pairs(g);
  for (std::size_t x = 0; x < anchors.size(); ++x) {
    for (std::size_t y = x + 1; y < anchors.size(); ++y) {
      if (anchors[x] != anchors[y]) pairs.emplace_back(anchors[x], anchors[y]);
    }
  }
  return Graph(g.num_vertices(), pairs);
}

}  // namespace bearing
