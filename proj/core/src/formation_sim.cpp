#include <cmath>
#include <limits>
#include <numbers>

#include "bearing/errors.hpp"
#include "bearing/formation.hpp"
#include "bearing/rigidity.hpp"

namespace bearing {

namespace {

struct LawName {
  Law law;
  const char* name;
};

constexpr LawName kLawNames[] = {
    {Law::si, "si"},
    {Law::si_pi, "si-pi"},
    {Law::si_vel, "si-vel"},
    {Law::di, "di"},
    {Law::di_acc, "di-acc"},
    {Law::unicycle, "unicycle"},
    {Law::bearing_only, "bearing-only"},
    {Law::bearing_gradient, "bearing-gradient"},
    {Law::bearing_descent, "bearing-descent"},
};

std::string axis_name(int c, int d) {
  if (d <= 3) return std::string(1, "xyz"[c]);
  return std::to_string(c + 1);
}

double nan_on_collocation(const auto& fn) {
  try {
    return fn();
  } catch (const CollocationError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

Law parse_law(const std::string& name) {
  for (const auto& entry : kLawNames) {
    if (name == entry.name) return entry.law;
  }
  throw InputError("unknown formation law '" + name + "'");
}

std::string to_string(Law law) {
  for (const auto& entry : kLawNames) {
    if (entry.law == law) return entry.name;
  }
  return "unknown";
}

bool law_uses_leaders(Law law) {
  switch (law) {
    case Law::si:
    case Law::si_pi:
    case Law::si_vel:
    case Law::di:
    case Law::di_acc: return true;
    default: return false;
  }
}

LeaderMotion LeaderMotion::stationary(int d) {
  LeaderMotion m;
  m.velocity = Eigen::VectorXd::Zero(d);
  return m;
}

LeaderMotion LeaderMotion::constant(Eigen::VectorXd velocity) {
  LeaderMotion m;
  m.kind = Kind::constant_velocity;
  m.velocity = std::move(velocity);
  return m;
}

LeaderMotion LeaderMotion::sinusoid(Eigen::VectorXd amplitude, Eigen::VectorXd frequency,
                                    Eigen::VectorXd phase) {
  if (amplitude.size() != frequency.size() || amplitude.size() != phase.size()) {
    throw InputError("sinusoid amplitude, frequency and phase must have equal length");
  }
  LeaderMotion m;
  m.kind = Kind::sinusoidal;
  m.amplitude = std::move(amplitude);
  m.frequency = std::move(frequency);
  m.phase = std::move(phase);
  return m;
}

Eigen::VectorXd LeaderMotion::velocity_at(double t, int d) const {
  switch (kind) {
    case Kind::stationary: return Eigen::VectorXd::Zero(d);
    case Kind::constant_velocity:
      if (velocity.size() != d) throw InputError("leader velocity must have d entries");
      return velocity;
    case Kind::sinusoidal: {
      if (amplitude.size() != d) throw InputError("leader sinusoid must have d entries");
      const Eigen::ArrayXd arg = 2.0 * std::numbers::pi * frequency.array() * t + phase.array();
      return amplitude.array() * arg.sin();
    }
  }
  return Eigen::VectorXd::Zero(d);
}

Eigen::VectorXd LeaderMotion::acceleration_at(double t, int d) const {
  if (kind != Kind::sinusoidal) {
    velocity_at(t, d);
    return Eigen::VectorXd::Zero(d);
  }
  if (amplitude.size() != d) throw InputError("leader sinusoid must have d entries");
  const Eigen::ArrayXd omega = 2.0 * std::numbers::pi * frequency.array();
  return amplitude.array() * omega * (omega * t + phase.array()).cos();
}

Eigen::VectorXd FormationRun::positions(const State& x) const {
  if (law != Law::unicycle) return x.head(static_cast<Eigen::Index>(d) * n);
  Eigen::VectorXd p(2 * n);
  for (int i = 0; i < n; ++i) p.segment(2 * i, 2) = x.segment(3 * i, 2);
  return p;
}

namespace {

class FormationSystem {
 public:
  FormationSystem(const TargetFormation& tf, Law law, const Gains& gains, const LeaderMotion& motion)
      : tf_(tf), law_(law), gains_(gains), motion_(motion), d_(tf.dimension()), n_(tf.num_agents()),
        dn_(static_cast<Eigen::Index>(d_) * n_),
        dnf_(static_cast<Eigen::Index>(tf.followers().size()) * d_) {}

  State initial_state(const FormationInit& init) const {
    if (init.positions.size() != dn_) throw InputError("initial positions must have d*n entries");
    switch (law_) {
      case Law::si_pi: {
        State x(dn_ + dnf_);
        x << init.positions, Eigen::VectorXd::Zero(dnf_);
        return x;
      }
      case Law::di:
      case Law::di_acc: {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dn_);
        if (init.velocities) {
          if (init.velocities->size() != dn_) throw InputError("initial velocities must have d*n entries");
          v = *init.velocities;
        } else {
          const Eigen::VectorXd vl = motion_.velocity_at(0.0, d_);
          for (int l : tf_.leaders()) v.segment(l * d_, d_) = vl;
        }
        State x(2 * dn_);
        x << init.positions, v;
        return x;
      }
      case Law::unicycle: {
        Eigen::VectorXd theta = Eigen::VectorXd::Zero(n_);
        if (init.headings) {
          if (init.headings->size() != n_) throw InputError("initial headings must have n entries");
          theta = *init.headings;
        }
        State x(3 * n_);
        for (int i = 0; i < n_; ++i) {
          x.segment(3 * i, 2) = init.positions.segment(2 * i, 2);
          x(3 * i + 2) = wrap_angle(theta(i));
        }
        return x;
      }
      default: return init.positions;
    }
  }

  State operator()(double t, const State& x) const {
    switch (law_) {
      case Law::si: {
        State dx = leader_velocity_field(t);
        scatter(dx, si_stabilization_field(tf_, x));
        return dx;
      }
      case Law::si_pi: {
        const PiRates rates = si_pi_field(tf_, x.head(dn_), x.tail(dnf_), gains_);
        State dx(dn_ + dnf_);
        Eigen::VectorXd dp = leader_velocity_field(t);
        scatter(dp, rates.velocity);
        dx << dp, rates.integral;
        return dx;
      }
      case Law::si_vel: {
        const Eigen::VectorXd vl = motion_.velocity_at(t, d_);
        const Eigen::VectorXd stacked = vl.replicate(static_cast<Eigen::Index>(tf_.leaders().size()), 1);
        State dx = leader_velocity_field(t);
        scatter(dx, si_velocity_feedback_velocities(tf_, x, stacked, gains_));
        return dx;
      }
      case Law::di:
      case Law::di_acc: {
        const Eigen::VectorXd p = x.head(dn_);
        const Eigen::VectorXd v = x.tail(dn_);
        const Eigen::VectorXd al = motion_.acceleration_at(t, d_);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(dn_);
        for (int l : tf_.leaders()) acc.segment(l * d_, d_) = al;
        if (law_ == Law::di) {
          scatter(acc, di_field(tf_, p, v, gains_));
        } else {
          const Eigen::VectorXd stacked = al.replicate(static_cast<Eigen::Index>(tf_.leaders().size()), 1);
          scatter(acc, di_acceleration_feedback_accelerations(tf_, p, v, stacked, gains_));
        }
        State dx(2 * dn_);
        dx << v, acc;
        return dx;
      }
      case Law::unicycle: {
        const UnicycleCommand cmd = unicycle_field(tf_, x);
        State dx(3 * n_);
        for (int i = 0; i < n_; ++i) {
          dx(3 * i) = cmd.linear(i) * std::cos(x(3 * i + 2));
          dx(3 * i + 1) = cmd.linear(i) * std::sin(x(3 * i + 2));
          dx(3 * i + 2) = cmd.angular(i);
        }
        return dx;
      }
      case Law::bearing_only: return bearing_only_field(tf_, x);
      case Law::bearing_gradient: return bearing_gradient_field(tf_, x);
      case Law::bearing_descent: return bearing_only_descent_field(tf_, x);
    }
    throw InputError("unsupported formation law");
  }

  std::vector<std::string> state_labels() const {
    std::vector<std::string> labels;
    auto agent_block = [&](const std::string& prefix, const std::vector<int>& agents) {
      for (int i : agents) {
        for (int c = 0; c < d_; ++c) labels.push_back(prefix + std::to_string(i + 1) + "_" + axis_name(c, d_));
      }
    };
    std::vector<int> all(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) all[i] = i;
    if (law_ == Law::unicycle) {
      for (int i = 0; i < n_; ++i) {
        labels.push_back("p" + std::to_string(i + 1) + "_x");
        labels.push_back("p" + std::to_string(i + 1) + "_y");
        labels.push_back("theta" + std::to_string(i + 1));
      }
      return labels;
    }
    agent_block("p", all);
    if (law_ == Law::si_pi) agent_block("xi", tf_.followers());
    if (law_ == Law::di || law_ == Law::di_acc) agent_block("v", all);
    return labels;
  }

 private:
  Eigen::VectorXd leader_velocity_field(double t) const {
    Eigen::VectorXd dx = Eigen::VectorXd::Zero(dn_);
    if (tf_.leaders().empty()) return dx;
    const Eigen::VectorXd vl = motion_.velocity_at(t, d_);
    for (int l : tf_.leaders()) dx.segment(l * d_, d_) = vl;
    return dx;
  }

  void scatter(Eigen::VectorXd& full, const Eigen::VectorXd& followers) const {
    for (std::size_t s = 0; s < tf_.followers().size(); ++s) {
      full.segment(tf_.followers()[s] * d_, d_) = followers.segment(static_cast<Eigen::Index>(s) * d_, d_);
    }
  }

  const TargetFormation& tf_;
  Law law_;
  Gains gains_;
  const LeaderMotion& motion_;
  int d_;
  int n_;
  Eigen::Index dn_;
  Eigen::Index dnf_;
};

}  // namespace

FormationRun simulate_formation(const TargetFormation& tf, Law law, const FormationInit& init,
                                const Gains& gains, const LeaderMotion& leader_motion,
                                const SimConfig& cfg) {
  gains.validate();
  cfg.validate();
  if (law_uses_leaders(law) && !tf.has_leaders()) {
    throw InputError("law " + to_string(law) + " needs at least one leader");
  }
  if (!law_uses_leaders(law) && tf.has_leaders()) {
    throw InputError("law " + to_string(law) + " is leaderless but the target names leaders");
  }
  if (law == Law::unicycle && tf.dimension() != 2) throw InputError("unicycle law requires d = 2");

  FormationRun run;
  run.law = law;
  run.d = tf.dimension();
  run.n = tf.num_agents();
  const FormationSystem system(tf, law, gains, leader_motion);
  run.state_labels = system.state_labels();
  const State x0 = system.initial_state(init);

  Observer obs;
  obs.names = {"bearing_error", "bearing_error_pm"};
  for (int c = 0; c < run.d; ++c) obs.names.push_back("centroid_" + axis_name(c, run.d));
  obs.names.insert(obs.names.end(), {"scale", "phi1", "phi2"});
  if (law == Law::si_vel) obs.names.push_back("eps_norm");
  obs.evaluate = [&](double, const State& x) {
    const Eigen::VectorXd p = run.positions(x);
    const FormationMetrics m = formation_metrics(tf, p);
    std::vector<double> row{m.bearing_error,
                            nan_on_collocation([&] { return sign_invariant_bearing_error(tf, p); })};
    for (int c = 0; c < run.d; ++c) row.push_back(m.centroid(c));
    row.push_back(m.scale);
    row.push_back(nan_on_collocation([&] { return phi1(tf, p); }));
    row.push_back(nan_on_collocation([&] { return phi2(tf, p); }));
    if (law == Law::si_vel) row.push_back(velocity_feedback_signal(tf, p, gains).norm());
    return row;
  };

  IntegrateOptions options;
  options.observer = std::move(obs);
  if (law == Law::unicycle) {
    options.projection = [n = run.n](State& x) {
      for (int i = 0; i < n; ++i) x(3 * i + 2) = wrap_angle(x(3 * i + 2));
    };
  }
  run.trajectory = integrate([&](double t, const State& x) { return system(t, x); }, x0, cfg, options);
  return run;
}

}  // namespace bearing
