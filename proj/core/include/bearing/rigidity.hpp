#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bearing/graph.hpp"
#include "bearing/linalg.hpp"

namespace bearing {

// A graph embedded in R^d. Positions are stacked p = [p_0; ...; p_{n-1}].
class Network {
 public:
  // Throws InputError for d < 2, n < 2 or a size mismatch, and
  // CollocationError when two adjacent nodes are within kCollocationTolerance.
  Network(Graph graph, int d, Eigen::VectorXd positions);

  const Graph& graph() const { return graph_; }
  int dimension() const { return d_; }
  int num_nodes() const { return graph_.num_vertices(); }
  int num_edges() const { return graph_.num_edges(); }
  const Eigen::VectorXd& positions() const { return p_; }
  Eigen::VectorXd position(int i) const { return p_.segment(i * d_, d_); }

  // e_k = p_j - p_i for the k-th canonically oriented edge (i, j).
  Eigen::VectorXd edge_vector(int k) const;

 private:
  Graph graph_;
  int d_;
  Eigen::VectorXd p_;
};

// Orthogonal projection onto the complement of x: I - x x^T / |x|^2.
// Throws InputError when |x| <= kCollocationTolerance.
Eigen::MatrixXd projection(const Eigen::VectorXd& x);

// Stacked unit bearings g_k = e_k / |e_k|, length dm.
Eigen::VectorXd bearing_function(const Network& net);
// Bearings of an arbitrary configuration on `g`; throws CollocationError.
Eigen::VectorXd bearing_function(const Graph& g, int d, const Eigen::VectorXd& p);

// R_B = blockdiag(P_{g_k} / |e_k|) (H kron I_d), shape dm x dn.
Eigen::MatrixXd bearing_rigidity_matrix(const Network& net);

// R_D = blockdiag(e_k^T) (H kron I_d), shape m x dn.
Eigen::MatrixXd distance_rigidity_matrix(const Network& net);

// Matrix-weighted Laplacian with -P_{g_ij} off-diagonal blocks on edges and
// sum_k P_{g_ik} on the diagonal, shape dn x dn.
Eigen::MatrixXd bearing_laplacian(const Network& net);
// Same Laplacian from externally supplied bearings (stacked per canonical edge).
Eigen::MatrixXd bearing_laplacian(const Graph& g, int d, const Eigen::VectorXd& bearings);

struct MotionBasis {
  Eigen::MatrixXd basis;  // orthonormal columns
  // p lies in the translation span (e.g. all nodes at one point); the basis
  // then has d columns instead of d + 1.
  bool degenerate = false;
};

// Orthonormal basis of span{1_n kron I_d, p}.
MotionBasis trivial_bearing_motion_basis(int n, int d, const Eigen::VectorXd& p);
MotionBasis trivial_bearing_motion_basis(const Network& net);

// Orthonormal basis of the translations plus infinitesimal rotations S p for
// every skew-symmetric generator S of so(d).
Eigen::MatrixXd trivial_distance_motion_basis(const Network& net);

enum class Verdict { rigid, not_rigid };
std::string to_string(Verdict v);

struct RigidityReport {
  int rank = 0;
  int nullity = 0;
  int expected_rank = 0;
  Verdict verdict = Verdict::not_rigid;
  // Unit-norm nontrivial infinitesimal motion, present when not rigid.
  std::optional<Eigen::VectorXd> witness;
  Eigen::VectorXd singular_values;  // descending

  bool rigid() const { return verdict == Verdict::rigid; }
};

// Rigid iff rank(R_B) == dn - d - 1.
RigidityReport is_infinitesimally_bearing_rigid(const Network& net);
// Rigid iff rank(R_D) == dn - dim(trivial distance motions actually spanned).
RigidityReport is_infinitesimally_distance_rigid(const Network& net);

enum class GenericVerdict { yes, inconclusive };
std::string to_string(GenericVerdict v);

struct GenericRigidityReport {
  GenericVerdict verdict = GenericVerdict::inconclusive;
  int trials = 0;
  int trials_used = 0;
  std::uint64_t seed = 0;
  // Configuration that certified rigidity, when verdict == yes.
  std::optional<Eigen::VectorXd> certificate;
};

inline constexpr int kDefaultGenericTrials = 5;

// Samples configurations uniformly on [0,1]^d; yes as soon as one sample is
// infinitesimally bearing rigid. Throws InputError for trials < 1.
GenericRigidityReport is_generically_bearing_rigid(const Graph& g, int d, int trials,
                                                   std::uint64_t seed);

// ---------------------------------------------------------------------------
// SE(2) networks: directed edges, planar positions and headings.

struct Arc {
  int tail = 0;
  int head = 0;
  friend bool operator==(const Arc&, const Arc&) = default;
};

class SE2Network {
 public:
  // Headings are wrapped into (-pi, pi]. Throws InputError for self-loops,
  // bad indices or size mismatches, CollocationError for collocated arcs.
  // Duplicate arcs collapse; (i, j) and (j, i) are distinct.
  SE2Network(int n, std::vector<Arc> arcs, Eigen::VectorXd positions, Eigen::VectorXd headings);

  int num_nodes() const { return n_; }
  int num_arcs() const { return static_cast<int>(arcs_.size()); }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Eigen::VectorXd& positions() const { return p_; }
  const Eigen::VectorXd& headings() const { return psi_; }

 private:
  int n_;
  std::vector<Arc> arcs_;
  Eigen::VectorXd p_;
  Eigen::VectorXd psi_;
};

// Wraps an angle into (-pi, pi].
double wrap_angle(double theta);

// r_k = Rot(psi_i)^T g_k for arc k = (i, j): the bearing in node i's frame.
Eigen::VectorXd se2_bearing_function(const SE2Network& net);

// Analytic Jacobian of se2_bearing_function with respect to the stacked
// variable [p_0; ...; p_{n-1}; psi_0; ...; psi_{n-1}], shape 2m x 3n.
Eigen::MatrixXd se2_rigidity_matrix(const SE2Network& net);

// Columns: the two translations [1 kron I_2; 0], the scaling [p; 0] and the
// coordinated rotation [p_perp; 1_n] (not orthonormalised).
Eigen::MatrixXd se2_trivial_motions(const SE2Network& net);

// Rigid iff rank(R_SE) == 3n - 4.
RigidityReport is_se2_infinitesimally_rigid(const SE2Network& net);

}  // namespace bearing
