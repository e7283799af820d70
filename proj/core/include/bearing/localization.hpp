#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "bearing/rigidity.hpp"
#include "bearing/sim.hpp"

namespace bearing {

// A network with a set of anchors (known positions) and the bearings that
// followers use to localize themselves.
class AnchoredNetwork {
 public:
  // Bearings computed from the network's own configuration.
  AnchoredNetwork(Network net, std::vector<int> anchors);
  // Externally measured bearings, stacked per canonical edge (dm entries,
  // each block normalised). Positions of followers are then only an initial
  // reference and no ground truth is assumed.
  AnchoredNetwork(Network net, std::vector<int> anchors, Eigen::VectorXd measured_bearings);

  const Network& network() const { return net_; }
  int dimension() const { return net_.dimension(); }
  // Sorted ascending, duplicates removed.
  const std::vector<int>& anchors() const { return anchors_; }
  // Complement of anchors, ascending.
  const std::vector<int>& followers() const { return followers_; }
  const Eigen::VectorXd& bearings() const { return bearings_; }
  bool bearings_from_truth() const { return from_truth_; }

  // Stacked anchor / follower positions in anchors() / followers() order.
  Eigen::VectorXd anchor_positions() const;
  Eigen::VectorXd follower_positions() const;

  // Bearing Laplacian assembled from bearings().
  const Eigen::MatrixXd& laplacian() const { return laplacian_; }

 private:
  void init_roles(std::vector<int> anchors);

  Network net_;
  std::vector<int> anchors_;
  std::vector<int> followers_;
  Eigen::VectorXd bearings_;
  bool from_truth_ = true;
  Eigen::MatrixXd laplacian_;
};

// Blocks of the bearing Laplacian with anchors ordered first.
struct LaplacianPartition {
  Eigen::MatrixXd aa;
  Eigen::MatrixXd af;
  Eigen::MatrixXd fa;
  Eigen::MatrixXd ff;
  std::vector<int> anchors;
  std::vector<int> followers;
  int d = 0;
};

// Throws InputError for an empty anchor set.
LaplacianPartition partition_laplacian(const AnchoredNetwork& an);

struct LocalizabilityReport {
  bool localizable = false;
  double sigma_min = 0.0;  // of L_ff
  double sigma_max = 0.0;
  int num_anchors = 0;
  int laplacian_nullity = 0;
  // Necessary count n_a >= dim Null(L) / d.
  double anchor_bound = 0.0;
  bool anchor_bound_satisfied = false;
  // Some infinitesimal bearing motion leaves every anchor fixed.
  bool anchor_free_motion = false;
  // Follower-only null vector of L_ff (stacked over followers), if any.
  std::optional<Eigen::VectorXd> anchor_free_witness;
};

// Localizable iff sigma_min(L_ff) > kRankTolerance * sigma_max(L_ff). An empty
// follower set is trivially localizable; no anchors means not localizable.
LocalizabilityReport is_bearing_localizable(const AnchoredNetwork& an);

struct LocalizationSolution {
  Eigen::VectorXd followers;  // stacked in followers() order
  double condition_number = 0.0;
  double objective = 0.0;  // J at the solution
};

// p_f = -L_ff^{-1} L_fa p_a via a Cholesky solve. Throws InfeasibleError when
// the network is not localizable.
LocalizationSolution solve_localization(const AnchoredNetwork& an,
                                        const Eigen::VectorXd& anchor_positions);
LocalizationSolution solve_localization(const AnchoredNetwork& an);

// J(p) = 1/2 sum_i sum_{j in N_i} |P_{g_ij}(p_i - p_j)|^2 over a full estimate.
double localization_objective(const AnchoredNetwork& an, const Eigen::VectorXd& estimate);

// Follower estimate derivative -sum_j P_{g_ij}(p_i - p_j), stacked in
// followers() order; anchors are pinned to anchor_positions.
Eigen::VectorXd localization_protocol_field(const AnchoredNetwork& an,
                                            const Eigen::VectorXd& follower_estimates,
                                            const Eigen::VectorXd& anchor_positions);

// Assembles a full dn estimate from anchors and follower blocks.
Eigen::VectorXd assemble_estimate(const AnchoredNetwork& an, const Eigen::VectorXd& followers,
                                  const Eigen::VectorXd& anchor_positions);

struct LocalizationRun {
  Trajectory trajectory;  // states are follower estimates
  bool localizable = false;
  bool has_truth = false;
  // Per-node errors at the final time (followers order); empty without truth.
  Eigen::VectorXd final_errors;
  double final_max_error = 0.0;
};

// Integrates the gradient protocol from an initial follower estimate.
// Metrics: J, and with ground truth max_error plus err_<node> per follower.
// Non-localizable inputs run to the horizon and are flagged in the result.
LocalizationRun simulate_localization(const AnchoredNetwork& an,
                                      const Eigen::VectorXd& initial_followers,
                                      const SimConfig& cfg);

}  // namespace bearing
