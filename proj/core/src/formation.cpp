#include "bearing/formation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "bearing/errors.hpp"
#include "bearing/linalg.hpp"
#include "bearing/rigidity.hpp"

namespace bearing {

void Gains::validate() const {
  for (double g : {kp, ki, kv}) {
    if (!(g > 0.0) || !std::isfinite(g)) throw InputError("control gains must be positive");
  }
}

TargetFormation::TargetFormation(Graph graph, int d, Eigen::VectorXd desired_bearings,
                                 std::vector<int> leaders)
    : graph_(std::move(graph)), d_(d), desired_(std::move(desired_bearings)),
      leaders_(std::move(leaders)) {
  if (d_ < 2) throw InputError("formation dimension must be >= 2");
  if (desired_.size() != static_cast<Eigen::Index>(graph_.num_edges()) * d_) {
    throw InputError("desired bearings must have one d-vector per edge");
  }
  for (int k = 0; k < graph_.num_edges(); ++k) {
    auto block = desired_.segment(k * d_, d_);
    const double norm = block.norm();
    if (!(norm > kCollocationTolerance)) throw InputError("desired bearing " + std::to_string(k) + " is zero");
    block /= norm;
    projections_.push_back(bearing::projection(block));
  }
  std::sort(leaders_.begin(), leaders_.end());
  leaders_.erase(std::unique(leaders_.begin(), leaders_.end()), leaders_.end());
  for (int l : leaders_) {
    if (l < 0 || l >= graph_.num_vertices()) throw InputError("leader " + std::to_string(l) + " does not exist");
  }
  slot_.assign(static_cast<std::size_t>(graph_.num_vertices()), -1);
  for (int i = 0; i < graph_.num_vertices(); ++i) {
    if (!std::binary_search(leaders_.begin(), leaders_.end(), i)) {
      slot_[i] = static_cast<int>(followers_.size());
      followers_.push_back(i);
    }
  }
  laplacian_ = bearing_laplacian(graph_, d_, desired_);

  if (followers_.empty()) {
    localizable_ = true;
    return;
  }
  const auto nf = static_cast<Eigen::Index>(followers_.size()) * d_;
  Eigen::MatrixXd ff(nf, nf);
  for (std::size_t r = 0; r < followers_.size(); ++r) {
    for (std::size_t c = 0; c < followers_.size(); ++c) {
      ff.block(static_cast<Eigen::Index>(r) * d_, static_cast<Eigen::Index>(c) * d_, d_, d_) =
          laplacian_.block(followers_[r] * d_, followers_[c] * d_, d_, d_);
    }
  }
  const SpectralRank sr = spectral_rank(ff);
  const double smax = sr.singular_values(0);
  localizable_ = smax > 0.0 &&
                 sr.singular_values(sr.singular_values.size() - 1) > kRankTolerance * smax;
  if (localizable_) ff_factor_.compute(ff);
}

TargetFormation TargetFormation::from_configuration(Graph graph, int d, const Eigen::VectorXd& p,
                                                    std::vector<int> leaders) {
  Eigen::VectorXd g = bearing_function(graph, d, p);
  return TargetFormation(std::move(graph), d, std::move(g), std::move(leaders));
}

Eigen::VectorXd TargetFormation::desired_bearing(int i, int j) const {
  const auto k = graph_.edge_index(i, j);
  if (!k) throw InputError("no edge between " + std::to_string(i) + " and " + std::to_string(j));
  const Eigen::VectorXd g = desired_.segment(*k * d_, d_);
  return i < j ? g : Eigen::VectorXd(-g);
}

Eigen::MatrixXd TargetFormation::gain_matrix(int i) const {
  return laplacian_.block(i * d_, i * d_, d_, d_);
}

Eigen::VectorXd solve_follower_block(const TargetFormation& tf, const Eigen::VectorXd& rhs) {
  if (!tf.localizable_) {
    throw InfeasibleError("target formation is not bearing localizable (L_ff singular)");
  }
  if (tf.followers_.empty()) return Eigen::VectorXd(0);
  return tf.ff_factor_.solve(rhs);
}

namespace {

// Accumulates sum_j P_{g*_ij} (x_i - x_j) for every node, stacked dn.
Eigen::VectorXd laplacian_product(const TargetFormation& tf, const Eigen::VectorXd& x) {
  const int d = tf.dimension();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (int k = 0; k < tf.graph().num_edges(); ++k) {
    const Edge& e = tf.graph().edges()[k];
    const Eigen::VectorXd pull = tf.projection(k) * (x.segment(e.first * d, d) - x.segment(e.second * d, d));
    out.segment(e.first * d, d) += pull;
    out.segment(e.second * d, d) -= pull;
  }
  return out;
}

Eigen::VectorXd follower_rows(const TargetFormation& tf, const Eigen::VectorXd& full) {
  const int d = tf.dimension();
  Eigen::VectorXd out(static_cast<Eigen::Index>(tf.followers().size()) * d);
  for (std::size_t s = 0; s < tf.followers().size(); ++s) {
    out.segment(static_cast<Eigen::Index>(s) * d, d) = full.segment(tf.followers()[s] * d, d);
  }
  return out;
}

// -L_fl x_l for leader-block input stacked in leaders() order.
Eigen::VectorXd leader_coupling(const TargetFormation& tf, const Eigen::VectorXd& leader_values) {
  const int d = tf.dimension();
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(tf.num_agents()) * d);
  for (std::size_t s = 0; s < tf.leaders().size(); ++s) {
    full.segment(tf.leaders()[s] * d, d) = leader_values.segment(static_cast<Eigen::Index>(s) * d, d);
  }
  return follower_rows(tf, laplacian_product(tf, full));
}

void require_size(const Eigen::VectorXd& x, Eigen::Index expected, const char* what) {
  if (x.size() != expected) {
    throw InputError(std::string(what) + " has " + std::to_string(x.size()) + " entries, expected " +
                     std::to_string(expected));
  }
}

Eigen::MatrixXd checked_gain_inverse(const TargetFormation& tf, int i) {
  const Eigen::MatrixXd k = tf.gain_matrix(i);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (!(lmax > 0.0) || !(lmin > kRankTolerance * lmax)) throw SingularGainError(i);
  return eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

void check_gain_matrices(const TargetFormation& tf) {
  for (int f : tf.followers()) checked_gain_inverse(tf, f);
}

double edge_length_or_throw(const Edge& e, const Eigen::VectorXd& ek) {
  const double len = ek.norm();
  if (len <= kCollocationTolerance) throw CollocationError(e.first, e.second, len);
  return len;
}

}  // namespace

Eigen::VectorXd follower_laplacian_product(const TargetFormation& tf, const Eigen::VectorXd& x) {
  return follower_rows(tf, laplacian_product(tf, x));
}

Eigen::VectorXd si_stabilization_field(const TargetFormation& tf, const Eigen::VectorXd& p) {
  require_size(p, static_cast<Eigen::Index>(tf.num_agents()) * tf.dimension(), "position vector");
  return -follower_laplacian_product(tf, p);
}

PiRates si_pi_field(const TargetFormation& tf, const Eigen::VectorXd& p, const Eigen::VectorXd& xi,
                    const Gains& gains) {
  const int d = tf.dimension();
  require_size(p, static_cast<Eigen::Index>(tf.num_agents()) * d, "position vector");
  require_size(xi, static_cast<Eigen::Index>(tf.followers().size()) * d, "integral state");
  PiRates out;
  out.integral = follower_laplacian_product(tf, p);
  out.velocity = -gains.kp * out.integral - gains.ki * xi;
  return out;
}

Eigen::VectorXd velocity_feedback_signal(const TargetFormation& tf, const Eigen::VectorXd& p,
                                         const Gains& gains) {
  return gains.kp * follower_laplacian_product(tf, p);
}

Eigen::VectorXd si_velocity_feedback_field(const TargetFormation& tf, const Eigen::VectorXd& p,
                                           const Eigen::VectorXd& velocities, const Gains& gains) {
  const int d = tf.dimension();
  const auto dn = static_cast<Eigen::Index>(tf.num_agents()) * d;
  require_size(p, dn, "position vector");
  require_size(velocities, dn, "velocity vector");
  Eigen::VectorXd out(static_cast<Eigen::Index>(tf.followers().size()) * d);
  for (std::size_t s = 0; s < tf.followers().size(); ++s) {
    const int i = tf.followers()[s];
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
    for (int j : tf.graph().neighbors(i)) {
      const int k = *tf.graph().edge_index(i, j);
      sum += tf.projection(k) *
             (gains.kp * (p.segment(i * d, d) - p.segment(j * d, d)) - velocities.segment(j * d, d));
    }
    out.segment(static_cast<Eigen::Index>(s) * d, d) = -checked_gain_inverse(tf, i) * sum;
  }
  return out;
}

Eigen::VectorXd si_velocity_feedback_velocities(const TargetFormation& tf, const Eigen::VectorXd& p,
                                                const Eigen::VectorXd& leader_velocities,
                                                const Gains& gains) {
  const int d = tf.dimension();
  require_size(p, static_cast<Eigen::Index>(tf.num_agents()) * d, "position vector");
  require_size(leader_velocities, static_cast<Eigen::Index>(tf.leaders().size()) * d, "leader velocities");
  check_gain_matrices(tf);
  const Eigen::VectorXd rhs =
      -gains.kp * follower_laplacian_product(tf, p) - leader_coupling(tf, leader_velocities);
  return solve_follower_block(tf, rhs);
}

Eigen::VectorXd di_field(const TargetFormation& tf, const Eigen::VectorXd& p, const Eigen::VectorXd& v,
                         const Gains& gains) {
  const auto dn = static_cast<Eigen::Index>(tf.num_agents()) * tf.dimension();
  require_size(p, dn, "position vector");
  require_size(v, dn, "velocity vector");
  return -follower_laplacian_product(tf, gains.kp * p + gains.kv * v);
}

Eigen::VectorXd di_acceleration_feedback_field(const TargetFormation& tf, const Eigen::VectorXd& p,
                                               const Eigen::VectorXd& v,
                                               const Eigen::VectorXd& accelerations,
                                               const Gains& gains) {
  const int d = tf.dimension();
  const auto dn = static_cast<Eigen::Index>(tf.num_agents()) * d;
  require_size(p, dn, "position vector");
  require_size(v, dn, "velocity vector");
  require_size(accelerations, dn, "acceleration vector");
  Eigen::VectorXd out(static_cast<Eigen::Index>(tf.followers().size()) * d);
  for (std::size_t s = 0; s < tf.followers().size(); ++s) {
    const int i = tf.followers()[s];
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
    for (int j : tf.graph().neighbors(i)) {
      const int k = *tf.graph().edge_index(i, j);
      sum += tf.projection(k) * (-gains.kp * (p.segment(i * d, d) - p.segment(j * d, d)) -
                                 gains.kv * (v.segment(i * d, d) - v.segment(j * d, d)) +
                                 accelerations.segment(j * d, d));
    }
    out.segment(static_cast<Eigen::Index>(s) * d, d) = checked_gain_inverse(tf, i) * sum;
  }
  return out;
}

Eigen::VectorXd di_acceleration_feedback_accelerations(const TargetFormation& tf,
                                                       const Eigen::VectorXd& p,
                                                       const Eigen::VectorXd& v,
                                                       const Eigen::VectorXd& leader_accelerations,
                                                       const Gains& gains) {
  const int d = tf.dimension();
  const auto dn = static_cast<Eigen::Index>(tf.num_agents()) * d;
  require_size(p, dn, "position vector");
  require_size(v, dn, "velocity vector");
  require_size(leader_accelerations, static_cast<Eigen::Index>(tf.leaders().size()) * d,
               "leader accelerations");
  check_gain_matrices(tf);
  const Eigen::VectorXd rhs = -follower_laplacian_product(tf, gains.kp * p + gains.kv * v) -
                              leader_coupling(tf, leader_accelerations);
  return solve_follower_block(tf, rhs);
}

UnicycleCommand unicycle_field(const TargetFormation& tf, const Eigen::VectorXd& states) {
  if (tf.dimension() != 2) throw InputError("unicycle law requires d = 2");
  const int n = tf.num_agents();
  require_size(states, 3 * static_cast<Eigen::Index>(n), "unicycle state");
  Eigen::VectorXd s = Eigen::VectorXd::Zero(2 * n);
  for (int k = 0; k < tf.graph().num_edges(); ++k) {
    const Edge& e = tf.graph().edges()[k];
    const Eigen::Vector2d pi(states(3 * e.first), states(3 * e.first + 1));
    const Eigen::Vector2d pj(states(3 * e.second), states(3 * e.second + 1));
    const Eigen::VectorXd push = tf.projection(k) * (pj - pi);
    s.segment(2 * e.first, 2) += push;
    s.segment(2 * e.second, 2) -= push;
  }
  UnicycleCommand cmd{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    const double c = std::cos(states(3 * i + 2));
    const double sn = std::sin(states(3 * i + 2));
    cmd.linear(i) = c * s(2 * i) + sn * s(2 * i + 1);
    cmd.angular(i) = -sn * s(2 * i) + c * s(2 * i + 1);
  }
  return cmd;
}

namespace {

enum class BearingLaw { only, gradient, descent };

Eigen::VectorXd bearing_law(const TargetFormation& tf, const Eigen::VectorXd& p, BearingLaw law) {
  const int d = tf.dimension();
  require_size(p, static_cast<Eigen::Index>(tf.num_agents()) * d, "position vector");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p.size());
  for (int k = 0; k < tf.graph().num_edges(); ++k) {
    const Edge& e = tf.graph().edges()[k];
    const Eigen::VectorXd ek = p.segment(e.second * d, d) - p.segment(e.first * d, d);
    const double len = edge_length_or_throw(e, ek);
    const Eigen::VectorXd g = ek / len;
    const auto gs = tf.desired_bearings().segment(k * d, d);
    // Term for node i = first; node j = second gets the negated term since
    // both g and g* flip sign.
    Eigen::VectorXd term;
    switch (law) {
      case BearingLaw::only: term = -(gs - g * g.dot(gs)); break;
      case BearingLaw::gradient: term = -(gs - g * g.dot(gs)) / len; break;
      case BearingLaw::descent: term = g - gs; break;
    }
    out.segment(e.first * d, d) += term;
    out.segment(e.second * d, d) -= term;
  }
  return out;
}

}  // namespace

Eigen::VectorXd bearing_only_field(const TargetFormation& tf, const Eigen::VectorXd& p) {
  return bearing_law(tf, p, BearingLaw::only);
}

Eigen::VectorXd bearing_gradient_field(const TargetFormation& tf, const Eigen::VectorXd& p) {
  return bearing_law(tf, p, BearingLaw::gradient);
}

Eigen::VectorXd bearing_only_descent_field(const TargetFormation& tf, const Eigen::VectorXd& p) {
  return bearing_law(tf, p, BearingLaw::descent);
}

namespace {

template <typename EdgeTerm>
double sum_over_edges(const TargetFormation& tf, const Eigen::VectorXd& p, EdgeTerm term) {
  const int d = tf.dimension();
  require_size(p, static_cast<Eigen::Index>(tf.num_agents()) * d, "position vector");
  double total = 0.0;
  for (int k = 0; k < tf.graph().num_edges(); ++k) {
    const Edge& e = tf.graph().edges()[k];
    const Eigen::VectorXd ek = p.segment(e.second * d, d) - p.segment(e.first * d, d);
    const double len = edge_length_or_throw(e, ek);
    total += term(ek / len, tf.desired_bearings().segment(k * d, d), len);
  }
  return total;
}

}  // namespace

double phi1(const TargetFormation& tf, const Eigen::VectorXd& p) {
  return sum_over_edges(tf, p, [](const Eigen::VectorXd& g, const auto& gs, double) {
    return 1.0 - g.dot(gs);
  });
}

double phi2(const TargetFormation& tf, const Eigen::VectorXd& p) {
  return sum_over_edges(tf, p, [](const Eigen::VectorXd& g, const auto& gs, double len) {
    return 0.5 * len * (1.0 - g.dot(gs));
  });
}

double sign_invariant_bearing_error(const TargetFormation& tf, const Eigen::VectorXd& p) {
  return 2.0 * sum_over_edges(tf, p, [](const Eigen::VectorXd& g, const auto& gs, double) {
           return std::min((g - gs).norm(), (g + gs).norm());
         });
}

FormationMetrics formation_metrics(const TargetFormation& tf, const Eigen::VectorXd& p) {
  const int d = tf.dimension();
  const int n = tf.num_agents();
  require_size(p, static_cast<Eigen::Index>(n) * d, "position vector");
  FormationMetrics m;
  m.centroid = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) m.centroid += p.segment(i * d, d);
  m.centroid /= n;

  double spread = 0.0;
  for (int i = 0; i < n; ++i) spread += (p.segment(i * d, d) - m.centroid).squaredNorm();
  m.scale = std::sqrt(spread / n);

  try {
    // Each undirected edge contributes |g_ij - g*_ij| + |g_ji - g*_ji|.
    m.bearing_error = 2.0 * sum_over_edges(tf, p, [](const Eigen::VectorXd& g, const auto& gs, double) {
                        return (g - gs).norm();
                      });
  } catch (const CollocationError&) {
    m.bearing_error = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

}  // namespace bearing
