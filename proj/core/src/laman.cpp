#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>

#include "bearing/errors.hpp"
#include "bearing/graph.hpp"

namespace bearing {

namespace {

void require_two_vertices(const Graph& g) {
  if (g.num_vertices() < 2) {
    throw InputError("Laman check needs n >= 2, got n = " + std::to_string(g.num_vertices()));
  }
}

// (2,3)-pebble game. Each vertex starts with two pebbles; an accepted edge is
// directed away from the vertex that paid for it.
class PebbleGame {
 public:
  explicit PebbleGame(int n)
      : pebbles_(static_cast<std::size_t>(n), 2), out_(static_cast<std::size_t>(n)) {}

  // Returns false when the edge is dependent; reach_set() then holds a vertex
  // set spanning more than 2k - 3 edges once (u, v) is counted.
  bool insert(int u, int v) {
    while (pebbles_[u] + pebbles_[v] < 4) {
      if (pebbles_[u] < 2 && collect(u, v)) continue;
      if (pebbles_[v] < 2 && collect(v, u)) continue;
      return false;
    }
    --pebbles_[u];
    out_[u].push_back(v);
    return true;
  }

  std::vector<int> reach_set(int u, int v) const {
    std::vector<char> seen(pebbles_.size(), 0);
    std::vector<int> stack{u, v};
    seen[u] = seen[v] = 1;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b : out_[a]) {
        if (!seen[b]) {
          seen[b] = 1;
          stack.push_back(b);
        }
      }
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (seen[i]) out.push_back(static_cast<int>(i));
    }
    return out;
  }

 private:
  // Pulls one free pebble to `root` along a directed path avoiding `blocked`,
  // reversing the path's edges.
  bool collect(int root, int blocked) {
    const std::size_t n = pebbles_.size();
    std::vector<int> parent(n, -1);
    std::vector<char> seen(n, 0);
    seen[root] = seen[blocked] = 1;
    std::vector<int> stack{root};
    int found = -1;
    while (!stack.empty() && found < 0) {
      const int a = stack.back();
      stack.pop_back();
      for (int b : out_[a]) {
        if (seen[b]) continue;
        seen[b] = 1;
        parent[b] = a;
        if (pebbles_[b] > 0) {
          found = b;
          break;
        }
        stack.push_back(b);
      }
    }
    if (found < 0) return false;
    for (int b = found; b != root; b = parent[b]) {
      const int a = parent[b];
      auto& arcs = out_[a];
      arcs.erase(std::find(arcs.begin(), arcs.end(), b));
      out_[b].push_back(a);
    }
    --pebbles_[found];
    ++pebbles_[root];
    return true;
  }

  std::vector<int> pebbles_;
  std::vector<std::vector<int>> out_;
};

}  // namespace

LamanCertificate is_laman_exhaustive(const Graph& g) {
  require_two_vertices(g);
  const int n = g.num_vertices();
  if (n > 20) {
    throw InputError("exhaustive Laman check is limited to small graphs");
  }
  LamanCertificate cert;
  cert.edge_count_ok = g.num_edges() == 2 * n - 3;

  std::vector<std::uint32_t> edge_masks;
  edge_masks.reserve(g.edges().size());
  for (const auto& e : g.edges()) edge_masks.push_back((1u << e.first) | (1u << e.second));

  std::uint32_t best = 0;
  int best_size = n + 1;
  const std::uint32_t full = (1u << n) - 1u;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const int k = std::popcount(mask);
    if (k < 2 || k >= best_size) continue;
    int spanned = 0;
    for (auto em : edge_masks) spanned += (em & mask) == em;
    if (spanned > 2 * k - 3) {
      best = mask;
      best_size = k;
    }
  }
  if (best != 0) {
    std::vector<int> subset;
    for (int i = 0; i < n; ++i) {
      if (best & (1u << i)) subset.push_back(i);
    }
    cert.violating_subset = std::move(subset);
  }
  cert.laman = cert.edge_count_ok && !cert.violating_subset;
  return cert;
}

LamanCertificate is_laman_pebble_game(const Graph& g) {
  require_two_vertices(g);
  LamanCertificate cert;
  cert.edge_count_ok = g.num_edges() == 2 * g.num_vertices() - 3;
  PebbleGame game(g.num_vertices());
  for (const auto& e : g.edges()) {
    if (!game.insert(e.first, e.second)) {
      cert.violating_subset = game.reach_set(e.first, e.second);
      break;
    }
  }
  cert.laman = cert.edge_count_ok && !cert.violating_subset;
  return cert;
}

LamanCertificate is_laman(const Graph& g) {
  require_two_vertices(g);
  if (g.num_vertices() <= kExhaustiveLamanLimit) return is_laman_exhaustive(g);
  return is_laman_pebble_game(g);
}

}  // namespace bearing
