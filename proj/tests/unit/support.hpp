#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "bearing/graph.hpp"

namespace bt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Vec vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v(k++) = x;
  return v;
}

inline double rel_error(const Mat& a, const Mat& b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

// Central differences, column by column.
inline Mat numeric_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h = 1e-6) {
  const Vec f0 = f(x);
  Mat jac(f0.size(), x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Vec xp = x;
    Vec xm = x;
    xp(c) += h;
    xm(c) -= h;
    jac.col(c) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return jac;
}

inline Vec numeric_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-6) {
  Vec g(x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Vec xp = x;
    Vec xm = x;
    xp(c) += h;
    xm(c) -= h;
    g(c) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

// Rank oracle independent of the library's SVD path.
inline int oracle_rank(const Mat& a, double tau = 1e-8) {
  if (a.size() == 0) return 0;
  const Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) r += s(k) > tau * s(0) ? 1 : 0;
  return r;
}

inline bearing::Graph cycle(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return bearing::Graph(n, e);
}

inline bearing::Graph complete(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  }
  return bearing::Graph(n, e);
}

inline bearing::Graph square_with_diagonal() { return bearing::Graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}}); }

inline Vec unit_square() { return vec({0, 0, 1, 0, 1, 1, 0, 1}); }

// Counts edges inside each vertex subset directly from the edge list.
inline bool brute_force_laman(const bearing::Graph& g) {
  const int n = g.num_vertices();
  if (g.num_edges() != 2 * n - 3) return false;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int k = __builtin_popcount(mask);
    if (k < 2) continue;
    int inside = 0;
    for (const auto& e : g.edges()) {
      if ((mask >> e.first & 1u) && (mask >> e.second & 1u)) ++inside;
    }
    if (inside > 2 * k - 3) return false;
  }
  return true;
}

inline bearing::Graph random_graph(int n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(density);
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (keep(rng)) e.emplace_back(i, j);
    }
  }
  return bearing::Graph(n, e);
}

inline Vec random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vec v(d);
  for (int c = 0; c < d; ++c) v(c) = normal(rng);
  return v / v.norm();
}

inline Vec random_vector(Eigen::Index size, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(size);
  for (Eigen::Index c = 0; c < size; ++c) v(c) = u(rng);
  return v;
}

}  // namespace bt
