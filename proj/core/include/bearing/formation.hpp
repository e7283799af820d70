#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "bearing/graph.hpp"
#include "bearing/sim.hpp"

namespace bearing {

struct Gains {
  double kp = 1.0;
  double ki = 1.0;
  double kv = 1.0;

  // Throws InputError unless every gain is strictly positive and finite.
  void validate() const;
};

// Target formation given by constant desired bearings g*_k on the canonically
// oriented edges (g*_ji = -g*_ij is implied) and an optional leader set.
class TargetFormation {
 public:
  // Bearings are normalised; throws InputError for zero bearings, size
  // mismatches, d < 2 or leader ids out of range.
  TargetFormation(Graph graph, int d, Eigen::VectorXd desired_bearings, std::vector<int> leaders = {});

  // Desired bearings read off a configuration that realises the target.
  static TargetFormation from_configuration(Graph graph, int d, const Eigen::VectorXd& p,
                                            std::vector<int> leaders = {});

  const Graph& graph() const { return graph_; }
  int dimension() const { return d_; }
  int num_agents() const { return graph_.num_vertices(); }
  const Eigen::VectorXd& desired_bearings() const { return desired_; }
  const std::vector<int>& leaders() const { return leaders_; }
  const std::vector<int>& followers() const { return followers_; }
  bool has_leaders() const { return !leaders_.empty(); }
  // Slot of node i in followers(), or -1 for leaders.
  int follower_slot(int i) const { return slot_[i]; }

  // g*_ij with the sign implied by the direction (i, j).
  Eigen::VectorXd desired_bearing(int i, int j) const;
  // P_{g*_k} for canonical edge k.
  const Eigen::MatrixXd& projection(int k) const { return projections_[k]; }
  // Bearing Laplacian built from the desired bearings.
  const Eigen::MatrixXd& laplacian() const { return laplacian_; }
  // K_i = sum_{j in N_i} P_{g*_ij}.
  Eigen::MatrixXd gain_matrix(int i) const;

  // L_ff nonsingular (vacuously true without followers).
  bool localizable() const { return localizable_; }

 private:
  friend Eigen::VectorXd solve_follower_block(const TargetFormation&, const Eigen::VectorXd&);

  Graph graph_;
  int d_;
  Eigen::VectorXd desired_;
  std::vector<int> leaders_;
  std::vector<int> followers_;
  std::vector<int> slot_;
  std::vector<Eigen::MatrixXd> projections_;
  Eigen::MatrixXd laplacian_;
  Eigen::LLT<Eigen::MatrixXd> ff_factor_;
  bool localizable_ = false;
};

// Solves L_ff x = rhs with the cached factorisation; throws InfeasibleError
// when the target is not bearing localizable.
Eigen::VectorXd solve_follower_block(const TargetFormation& tf, const Eigen::VectorXd& rhs);

// (L p)_f: the follower rows of the desired-bearing Laplacian applied to a
// full dn vector, stacked in followers() order.
Eigen::VectorXd follower_laplacian_product(const TargetFormation& tf, const Eigen::VectorXd& x);

// -------------------------------------------------------------------------
// Leader-follower laws. Inputs are full dn (all-agent) vectors; outputs are
// follower blocks stacked in followers() order.

// Single integrator, stationary leaders: -sum_j P_{g*_ij}(p_i - p_j).
Eigen::VectorXd si_stabilization_field(const TargetFormation& tf, const Eigen::VectorXd& p);

struct PiRates {
  Eigen::VectorXd velocity;  // follower velocities
  Eigen::VectorXd integral;  // xi derivative per follower
};

// Proportional-integral law. xi_i integrates sum_j P_{g*_ij}(p_i - p_j); the
// velocity is -k_p sum_j P(p_i - p_j) - k_I xi_i.
PiRates si_pi_field(const TargetFormation& tf, const Eigen::VectorXd& p, const Eigen::VectorXd& xi,
                    const Gains& gains);

// Per-agent velocity-feedback law
//   p_i' = -K_i^{-1} sum_j P_{g*_ij}[k_p(p_i - p_j) - p_j']
// evaluated with the supplied neighbor velocities (dn vector of all agents).
// Throws SingularGainError naming the first follower with singular K_i.
Eigen::VectorXd si_velocity_feedback_field(const TargetFormation& tf, const Eigen::VectorXd& p,
                                           const Eigen::VectorXd& velocities, const Gains& gains);

// Follower velocities that satisfy the velocity-feedback law simultaneously
// for every follower, given the leaders' velocities (stacked in leaders()
// order): L_ff p_f' = -k_p (L p)_f - L_fl p_l'.
Eigen::VectorXd si_velocity_feedback_velocities(const TargetFormation& tf, const Eigen::VectorXd& p,
                                                const Eigen::VectorXd& leader_velocities,
                                                const Gains& gains);

// epsilon_i = k_p sum_j P_{g*_ij}(p_i - p_j), stacked over followers.
Eigen::VectorXd velocity_feedback_signal(const TargetFormation& tf, const Eigen::VectorXd& p,
                                         const Gains& gains);

// Double integrator, constant-velocity leaders:
//   v_i' = -sum_j P_{g*_ij}[k_p(p_i - p_j) + k_v(v_i - v_j)].
Eigen::VectorXd di_field(const TargetFormation& tf, const Eigen::VectorXd& p, const Eigen::VectorXd& v,
                         const Gains& gains);

// Per-agent acceleration-feedback law
//   v_i' = K_i^{-1} sum_j P_{g*_ij}[-k_p(p_i - p_j) - k_v(v_i - v_j) + v_j'].
Eigen::VectorXd di_acceleration_feedback_field(const TargetFormation& tf, const Eigen::VectorXd& p,
                                               const Eigen::VectorXd& v,
                                               const Eigen::VectorXd& accelerations,
                                               const Gains& gains);

// Simultaneous solution of the acceleration-feedback law given leader
// accelerations (stacked in leaders() order).
Eigen::VectorXd di_acceleration_feedback_accelerations(const TargetFormation& tf,
                                                       const Eigen::VectorXd& p,
                                                       const Eigen::VectorXd& v,
                                                       const Eigen::VectorXd& leader_accelerations,
                                                       const Gains& gains);

// -------------------------------------------------------------------------
// Leaderless laws over all agents.

struct UnicycleCommand {
  Eigen::VectorXd linear;   // v_i
  Eigen::VectorXd angular;  // w_i
};

// states = [x_0, y_0, theta_0, x_1, ...]. With s_i = sum_j P_{g*_ij}(p_j - p_i):
// v_i = [cos, sin] s_i and w_i = [-sin, cos] s_i. Throws InputError if d != 2.
UnicycleCommand unicycle_field(const TargetFormation& tf, const Eigen::VectorXd& states);

// p_i' = -sum_j P_{g_ij(t)} g*_ij. Uses bearings only.
Eigen::VectorXd bearing_only_field(const TargetFormation& tf, const Eigen::VectorXd& p);
// p_i' = -sum_j P_{g_ij} g*_ij / |e_ij|: gradient descent on phi1.
Eigen::VectorXd bearing_gradient_field(const TargetFormation& tf, const Eigen::VectorXd& p);
// p_i' = sum_j (g_ij - g*_ij).
Eigen::VectorXd bearing_only_descent_field(const TargetFormation& tf, const Eigen::VectorXd& p);

// phi1 = sum over undirected edges of (1 - g^T g*).
double phi1(const TargetFormation& tf, const Eigen::VectorXd& p);
// phi2 = 1/2 sum over undirected edges of |e| (1 - g^T g*).
double phi2(const TargetFormation& tf, const Eigen::VectorXd& p);

struct FormationMetrics {
  // sum over ordered neighbor pairs of |g_ij - g*_ij| (NaN on collocation).
  double bearing_error = 0.0;
  Eigen::VectorXd centroid;
  // Standard deviation of the agent positions about the centroid,
  // sqrt(mean_i |p_i - c|^2).
  double scale = 0.0;
};

FormationMetrics formation_metrics(const TargetFormation& tf, const Eigen::VectorXd& p);

// Same sum as bearing_error but each pair matched against the closer of
// +g* and -g*.
double sign_invariant_bearing_error(const TargetFormation& tf, const Eigen::VectorXd& p);

// -------------------------------------------------------------------------
// Simulation.

enum class Law {
  si,
  si_pi,
  si_vel,
  di,
  di_acc,
  unicycle,
  bearing_only,
  bearing_gradient,
  bearing_descent,
};

// CLI spellings: si, si-pi, si-vel, di, di-acc, unicycle, bearing-only,
// bearing-gradient, bearing-descent.
Law parse_law(const std::string& name);
std::string to_string(Law law);
bool law_uses_leaders(Law law);

// Leader trajectory generator shared by every leader (the formation
// translates as a rigid body).
struct LeaderMotion {
  enum class Kind { stationary, constant_velocity, sinusoidal };
  Kind kind = Kind::stationary;
  Eigen::VectorXd velocity;   // constant_velocity, length d
  Eigen::VectorXd amplitude;  // sinusoidal, per axis
  Eigen::VectorXd frequency;  // Hz, per axis
  Eigen::VectorXd phase;      // radians, per axis

  static LeaderMotion stationary(int d);
  static LeaderMotion constant(Eigen::VectorXd velocity);
  static LeaderMotion sinusoid(Eigen::VectorXd amplitude, Eigen::VectorXd frequency, Eigen::VectorXd phase);

  // v(t) = A sin(2 pi f t + phase) for the sinusoid.
  Eigen::VectorXd velocity_at(double t, int d) const;
  Eigen::VectorXd acceleration_at(double t, int d) const;
};

struct FormationInit {
  Eigen::VectorXd positions;                  // dn
  std::optional<Eigen::VectorXd> velocities;  // dn, double integrators; default zero (leaders: v_l(0))
  std::optional<Eigen::VectorXd> headings;    // n, unicycles; default zero
};

struct FormationRun {
  Law law = Law::si;
  Trajectory trajectory;
  // Column labels for the state vector (1-based agent ids).
  std::vector<std::string> state_labels;

  // Agent positions (dn) extracted from a state of this run.
  Eigen::VectorXd positions(const State& x) const;

  int d = 0;
  int n = 0;
};

// Integrates the chosen law. Metrics: bearing_error, bearing_error_pm,
// centroid_<axis>, scale, phi1, phi2 and, for si-vel, eps_norm. Throws
// InputError when the law's leader requirement does not match the target.
FormationRun simulate_formation(const TargetFormation& tf, Law law, const FormationInit& init,
                                const Gains& gains, const LeaderMotion& leader_motion,
                                const SimConfig& cfg);

}  // namespace bearing
