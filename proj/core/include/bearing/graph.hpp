#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace bearing {

// An undirected edge stored with its canonical orientation: first < second.
struct Edge {
  int first = 0;
  int second = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Undirected simple graph on vertices 0..n-1.
//
// Edges keep the order of first appearance and are oriented i -> j with
// i < j; this fixed orientation is what every incidence / rigidity matrix in
// the toolkit is built against, so row k of those matrices is edges()[k].
class Graph {
 public:
  // Throws InputError on n < 1, self-loops and out-of-range indices.
  // Duplicate pairs (in either direction) collapse into one edge.
  Graph(int n, std::span<const std::pair<int, int>> edge_list);
  Graph(int n, std::initializer_list<std::pair<int, int>> edge_list);
  explicit Graph(int n) : Graph(n, std::span<const std::pair<int, int>>{}) {}

  int num_vertices() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adjacency_.at(i); }

  bool has_edge(int i, int j) const { return edge_index(i, j).has_value(); }
  // Row index of {i, j} in the canonical edge order.
  std::optional<int> edge_index(int i, int j) const;

  bool is_connected() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::map<Edge, int> index_;
};

// m x n incidence matrix of the canonically oriented graph: row k has -1 at
// the tail and +1 at the head of edge k, so e = (H kron I_d) p.
Eigen::MatrixXd incidence_matrix(const Graph& g);

struct LamanCertificate {
  bool laman = false;
  // Counting m against 2n - 3 failed (no subset certificate in that case).
  bool edge_count_ok = false;
  // A vertex subset with k >= 2 vertices spanning more than 2k - 3 edges.
  std::optional<std::vector<int>> violating_subset;
};

// Dispatches to the exhaustive check for n <= 16 and to the (2,3) pebble
// game above that. Throws InputError when n < 2.
LamanCertificate is_laman(const Graph& g);
LamanCertificate is_laman_exhaustive(const Graph& g);
LamanCertificate is_laman_pebble_game(const Graph& g);

inline constexpr int kExhaustiveLamanLimit = 16;

// Henneberg operations; the new vertex gets index g.num_vertices().
Graph henneberg_vertex_addition(const Graph& g, int i, int j);
Graph henneberg_edge_splitting(const Graph& g, int i, int j, int k);

// Seeded random Henneberg sequence starting from the single edge {0, 1}.
// Each step picks vertex addition or edge splitting uniformly (edge splitting
// needs at least three vertices) and attachment vertices uniformly.
Graph random_henneberg_graph(int n, std::mt19937_64& rng);

// Adds the clique on the anchor set. Throws InputError for fewer than two
// anchors or out-of-range ids.
Graph augment_anchors(const Graph& g, std::span<const int> anchors);

}  // namespace bearing
