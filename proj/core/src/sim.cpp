#include "bearing/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bearing/errors.hpp"

namespace bearing {

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("dt must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InputError("T must be positive");
  if (dt > horizon) throw InputError("dt must not exceed T");
  if (record_every < 1) throw InputError("record_every must be >= 1");
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::converged: return "converged";
    case EventKind::collocation: return "collocation";
    case EventKind::singular_gain: return "singular_gain";
    case EventKind::non_finite: return "non_finite";
  }
  return "unknown";
}

std::string to_string(Method method) { return method == Method::euler ? "euler" : "rk4"; }

Method parse_method(const std::string& name) {
  if (name == "euler") return Method::euler;
  if (name == "rk4") return Method::rk4;
  throw InputError("unknown integration method '" + name + "' (expected euler or rk4)");
}

bool Trajectory::has_event(EventKind kind) const {
  return std::any_of(events.begin(), events.end(), [kind](const Event& e) { return e.kind == kind; });
}

bool Trajectory::aborted() const {
  return std::any_of(events.begin(), events.end(),
                     [](const Event& e) { return e.kind != EventKind::converged; });
}

std::vector<double> Trajectory::metric(const std::string& name) const {
  const auto it = std::find(metric_names.begin(), metric_names.end(), name);
  if (it == metric_names.end()) throw std::out_of_range("no metric named " + name);
  const auto col = static_cast<std::size_t>(it - metric_names.begin());
  std::vector<double> out;
  out.reserve(metrics.size());
  for (const auto& row : metrics) out.push_back(row[col]);
  return out;
}

namespace {

State advance(const Field& field, double t, const State& x, const State& k1, double dt,
              Method method) {
  if (method == Method::euler) return x + dt * k1;
  const State k2 = field(t + 0.5 * dt, x + 0.5 * dt * k1);
  const State k3 = field(t + 0.5 * dt, x + 0.5 * dt * k2);
  const State k4 = field(t + dt, x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

State step(const Field& field, double t, const State& x, double dt, Method method) {
  return advance(field, t, x, field(t, x), dt, method);
}

namespace {

class Recorder {
 public:
  Recorder(Trajectory& traj, const std::optional<Observer>& observer)
      : traj_(traj), observer_(observer) {
    if (observer_) traj_.metric_names = observer_->names;
  }

  void record(double t, const State& x) {
    if (!traj_.times.empty() && traj_.times.back() >= t) return;
    traj_.times.push_back(t);
    traj_.states.push_back(x);
    if (observer_) traj_.metrics.push_back(observer_->evaluate(t, x));
  }

 private:
  Trajectory& traj_;
  const std::optional<Observer>& observer_;
};

}  // namespace

Trajectory integrate(const Field& field, const State& x0, const SimConfig& cfg,
                     const IntegrateOptions& options) {
  cfg.validate();
  Trajectory traj;
  Recorder recorder(traj, options.observer);

  State x = x0;
  if (options.projection) options.projection(x);
  recorder.record(0.0, x);

  // Whole steps only; the small slack absorbs T/dt landing just below an integer.
  const auto steps = static_cast<long long>(std::floor(cfg.horizon / cfg.dt + 1e-6));
  double t = 0.0;
  for (long long s = 1; s <= steps; ++s) {
    State next;
    try {
      const State k1 = field(t, x);
      if (cfg.convergence_tolerance > 0.0 && k1.norm() < cfg.convergence_tolerance) {
        traj.events.push_back({EventKind::converged, t, "field norm " + std::to_string(k1.norm())});
        break;
      }
      next = advance(field, t, x, k1, cfg.dt, cfg.method);
    } catch (const CollocationError& e) {
      traj.events.push_back({EventKind::collocation, t, e.what()});
      break;
    } catch (const SingularGainError& e) {
      traj.events.push_back({EventKind::singular_gain, t, e.what()});
      break;
    }
    if (!next.allFinite()) {
      traj.events.push_back({EventKind::non_finite, t, "state overflowed"});
      break;
    }
    if (options.projection) options.projection(next);
    x = std::move(next);
    t = static_cast<double>(s) * cfg.dt;
    if (s % cfg.record_every == 0 || s == steps) recorder.record(t, x);
  }
  recorder.record(t, x);
  return traj;
}

Eigen::VectorXd random_configuration(int n, int d, Box box, std::mt19937_64& rng,
                                     const Graph* adjacency) {
  if (n < 1 || d < 1) throw InputError("random configuration needs n >= 1 and d >= 1");
  if (!(box.hi > box.lo) || !std::isfinite(box.lo) || !std::isfinite(box.hi)) {
    throw InputError("sampling box must be finite with nonempty interior");
  }
  std::uniform_real_distribution<double> uniform(box.lo, box.hi);
  Eigen::VectorXd p(static_cast<Eigen::Index>(n) * d);
  for (;;) {
    for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = uniform(rng);
    if (adjacency == nullptr) return p;
    const bool collocated = std::any_of(
        adjacency->edges().begin(), adjacency->edges().end(), [&](const Edge& e) {
          return (p.segment(e.first * d, d) - p.segment(e.second * d, d)).norm() <=
                 kCollocationTolerance;
        });
    if (!collocated) return p;
  }
}

Eigen::VectorXd random_configuration(int n, int d, Box box, std::uint64_t seed,
                                     const Graph* adjacency) {
  std::mt19937_64 rng(seed);
  return random_configuration(n, d, box, rng, adjacency);
}

}  // namespace bearing
