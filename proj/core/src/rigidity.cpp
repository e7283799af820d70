#include "bearing/rigidity.hpp"

#include <Eigen/SVD>

#include "bearing/errors.hpp"
#include "bearing/sim.hpp"
#include "report_detail.hpp"

namespace bearing {

Network::Network(Graph graph, int d, Eigen::VectorXd positions)
    : graph_(std::move(graph)), d_(d), p_(std::move(positions)) {
  if (d_ < 2) throw InputError("network dimension must be >= 2, got " + std::to_string(d_));
  if (graph_.num_vertices() < 2) throw InputError("network needs at least two nodes");
  if (p_.size() != static_cast<Eigen::Index>(d_) * graph_.num_vertices()) {
    throw InputError("configuration has " + std::to_string(p_.size()) + " entries, expected " +
                     std::to_string(d_ * graph_.num_vertices()));
  }
  if (!p_.allFinite()) throw InputError("configuration contains non-finite values");
  for (int k = 0; k < num_edges(); ++k) {
    const double dist = edge_vector(k).norm();
    if (dist <= kCollocationTolerance) {
      throw CollocationError(graph_.edges()[k].first, graph_.edges()[k].second, dist);
    }
  }
}

Eigen::VectorXd Network::edge_vector(int k) const {
  const Edge& e = graph_.edges()[k];
  return p_.segment(e.second * d_, d_) - p_.segment(e.first * d_, d_);
}

Eigen::MatrixXd projection(const Eigen::VectorXd& x) {
  const double norm = x.norm();
  if (!(norm > kCollocationTolerance)) {
    throw InputError("projection of a (near) zero vector is undefined");
  }
  const Eigen::VectorXd u = x / norm;
  return Eigen::MatrixXd::Identity(x.size(), x.size()) - u * u.transpose();
}

Eigen::VectorXd bearing_function(const Graph& g, int d, const Eigen::VectorXd& p) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(g.num_edges()) * d);
  for (int k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges()[k];
    const Eigen::VectorXd ek = p.segment(e.second * d, d) - p.segment(e.first * d, d);
    const double len = ek.norm();
    if (len <= kCollocationTolerance) throw CollocationError(e.first, e.second, len);
    out.segment(k * d, d) = ek / len;
  }
  return out;
}

Eigen::VectorXd bearing_function(const Network& net) {
  return bearing_function(net.graph(), net.dimension(), net.positions());
}

Eigen::MatrixXd bearing_rigidity_matrix(const Network& net) {
  const int d = net.dimension();
  const int m = net.num_edges();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m) * d,
                                            static_cast<Eigen::Index>(net.num_nodes()) * d);
  // Block row k is (P_{g_k} / |e_k|) times (-I at tail, +I at head).
  for (int k = 0; k < m; ++k) {
    const Edge& e = net.graph().edges()[k];
    const Eigen::VectorXd ek = net.edge_vector(k);
    const Eigen::MatrixXd block = projection(ek) / ek.norm();
    r.block(k * d, e.first * d, d, d) = -block;
    r.block(k * d, e.second * d, d, d) = block;
  }
  return r;
}

Eigen::MatrixXd distance_rigidity_matrix(const Network& net) {
  const int d = net.dimension();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(net.num_edges(), static_cast<Eigen::Index>(net.num_nodes()) * d);
  for (int k = 0; k < net.num_edges(); ++k) {
    const Edge& e = net.graph().edges()[k];
    const Eigen::VectorXd ek = net.edge_vector(k);
    r.block(k, e.first * d, 1, d) = -ek.transpose();
    r.block(k, e.second * d, 1, d) = ek.transpose();
  }
  return r;
}

Eigen::MatrixXd bearing_laplacian(const Graph& g, int d, const Eigen::VectorXd& bearings) {
  if (bearings.size() != static_cast<Eigen::Index>(g.num_edges()) * d) {
    throw InputError("bearing vector size does not match the edge count");
  }
  const Eigen::Index dn = static_cast<Eigen::Index>(g.num_vertices()) * d;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(dn, dn);
  for (int k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges()[k];
    const Eigen::MatrixXd pk = projection(bearings.segment(k * d, d));
    lap.block(e.first * d, e.second * d, d, d) -= pk;
    lap.block(e.second * d, e.first * d, d, d) -= pk;
    lap.block(e.first * d, e.first * d, d, d) += pk;
    lap.block(e.second * d, e.second * d, d, d) += pk;
  }
  return lap;
}

Eigen::MatrixXd bearing_laplacian(const Network& net) {
  return bearing_laplacian(net.graph(), net.dimension(), bearing_function(net));
}

MotionBasis trivial_bearing_motion_basis(int n, int d, const Eigen::VectorXd& p) {
  const Eigen::Index dn = static_cast<Eigen::Index>(n) * d;
  Eigen::MatrixXd span(dn, d + 1);
  for (int c = 0; c < d; ++c) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(dn);
    for (int i = 0; i < n; ++i) t(i * d + c) = 1.0;
    span.col(c) = t;
  }
  span.col(d) = p;
  MotionBasis out;
  out.basis = orthonormal_range(span);
  out.degenerate = out.basis.cols() < d + 1;
  return out;
}

MotionBasis trivial_bearing_motion_basis(const Network& net) {
  return trivial_bearing_motion_basis(net.num_nodes(), net.dimension(), net.positions());
}

Eigen::MatrixXd trivial_distance_motion_basis(const Network& net) {
  const int n = net.num_nodes();
  const int d = net.dimension();
  const Eigen::Index dn = static_cast<Eigen::Index>(n) * d;
  const int rotations = d * (d - 1) / 2;
  Eigen::MatrixXd span = Eigen::MatrixXd::Zero(dn, d + rotations);
  for (int c = 0; c < d; ++c) {
    for (int i = 0; i < n; ++i) span(i * d + c, c) = 1.0;
  }
  int col = d;
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b, ++col) {
      // Generator E_ab - E_ba applied to every position.
      for (int i = 0; i < n; ++i) {
        span(i * d + a, col) = net.positions()(i * d + b);
        span(i * d + b, col) = -net.positions()(i * d + a);
      }
    }
  }
  return orthonormal_range(span);
}

std::string to_string(Verdict v) { return v == Verdict::rigid ? "rigid" : "not_rigid"; }
std::string to_string(GenericVerdict v) { return v == GenericVerdict::yes ? "yes" : "inconclusive"; }

namespace detail {

// Null-space directions of a matrix with the trivial motions projected out.
// Returns the dominant remaining direction, or nothing when the null space is
// (numerically) all trivial.
std::optional<Eigen::VectorXd> nontrivial_witness(const SpectralRank& sr,
                                                  const Eigen::MatrixXd& trivial_orthonormal) {
  const Eigen::Index cols = sr.right_vectors.cols();
  const Eigen::Index nullity = cols - sr.rank;
  if (nullity <= 0) return std::nullopt;
  const Eigen::MatrixXd null = sr.right_vectors.rightCols(nullity);
  const Eigen::MatrixXd residual =
      null - trivial_orthonormal * (trivial_orthonormal.transpose() * null);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual, Eigen::ComputeThinU);
  if (svd.singularValues().size() == 0 || svd.singularValues()(0) < 1e-6) return std::nullopt;
  Eigen::VectorXd w = svd.matrixU().col(0);
  return w / w.norm();
}

RigidityReport make_report(const Eigen::MatrixXd& matrix, int expected_rank,
                           const Eigen::MatrixXd& trivial_orthonormal) {
  const SpectralRank sr = spectral_rank(matrix);
  RigidityReport rep;
  rep.rank = sr.rank;
  rep.nullity = static_cast<int>(matrix.cols()) - sr.rank;
  rep.expected_rank = expected_rank;
  rep.singular_values = sr.singular_values;
  rep.verdict = sr.rank == expected_rank ? Verdict::rigid : Verdict::not_rigid;
  if (!rep.rigid()) rep.witness = nontrivial_witness(sr, trivial_orthonormal);
  return rep;
}

}  // namespace detail

RigidityReport is_infinitesimally_bearing_rigid(const Network& net) {
  const int dn = net.dimension() * net.num_nodes();
  return detail::make_report(bearing_rigidity_matrix(net), dn - net.dimension() - 1,
                             trivial_bearing_motion_basis(net).basis);
}

RigidityReport is_infinitesimally_distance_rigid(const Network& net) {
  const int dn = net.dimension() * net.num_nodes();
  const Eigen::MatrixXd trivial = trivial_distance_motion_basis(net);
  return detail::make_report(distance_rigidity_matrix(net), dn - static_cast<int>(trivial.cols()),
                             trivial);
}

GenericRigidityReport is_generically_bearing_rigid(const Graph& g, int d, int trials,
                                                   std::uint64_t seed) {
  if (trials < 1) throw InputError("generic rigidity sampling needs trials >= 1");
  GenericRigidityReport rep;
  rep.trials = trials;
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    ++rep.trials_used;
    Eigen::VectorXd p = random_configuration(g.num_vertices(), d, Box{0.0, 1.0}, rng, &g);
    const Network net(g, d, p);
    if (is_infinitesimally_bearing_rigid(net).rigid()) {
      rep.verdict = GenericVerdict::yes;
      rep.certificate = std::move(p);
      break;
    }
  }
  return rep;
}

}  // namespace bearing
