#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bearing/graph.hpp"
#include "bearing/linalg.hpp"

namespace bearing {

using State = Eigen::VectorXd;

enum class Method { euler, rk4 };

struct SimConfig {
  double dt = 1e-3;
  double horizon = 30.0;
  Method method = Method::rk4;
  int record_every = 1;
  std::uint64_t seed = 0;
  double collocation_tolerance = kCollocationTolerance;
  // Stop early once the field norm falls below this; <= 0 disables it.
  double convergence_tolerance = 1e-9;

  // Throws InputError unless 0 < dt <= horizon and record_every >= 1.
  void validate() const;
};

enum class EventKind { converged, collocation, singular_gain, non_finite };

struct Event {
  EventKind kind;
  double time;
  std::string detail;
};

std::string to_string(EventKind kind);
std::string to_string(Method method);
// Accepts "euler" / "rk4"; throws InputError otherwise.
Method parse_method(const std::string& name);

// Time-indexed record of a run. times, states and metric rows have equal
// length; metric columns are named by metric_names.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<std::string> metric_names;
  std::vector<std::vector<double>> metrics;
  std::vector<Event> events;

  bool has_event(EventKind kind) const;
  // True when an event other than convergence stopped the run.
  bool aborted() const;
  const State& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
  // Column of a named metric; throws std::out_of_range for unknown names.
  std::vector<double> metric(const std::string& name) const;
};

using Field = std::function<State(double t, const State& x)>;
// Maps a freshly stepped state back onto the state manifold (e.g. wrapping
// headings). Called after every accepted step.
using StepProjection = std::function<void(State& x)>;

struct Observer {
  std::vector<std::string> names;
  std::function<std::vector<double>(double t, const State& x)> evaluate;
};

struct IntegrateOptions {
  std::optional<Observer> observer;
  StepProjection projection;
};

// Explicit fixed-step integration of x' = field(t, x) from t = 0.
//
// The state is recorded at t = 0, every record_every steps, and at the final
// step. Fields signal undefined dynamics by throwing CollocationError or
// SingularGainError; the run then stops with the matching event instead of
// propagating the exception. Non-finite states stop the run with
// EventKind::non_finite.
Trajectory integrate(const Field& field, const State& x0, const SimConfig& cfg,
                     const IntegrateOptions& options = {});

// One explicit step; exposed for convergence-order tests.
State step(const Field& field, double t, const State& x, double dt, Method method);

struct Box {
  double lo = 0.0;
  double hi = 1.0;
};

// n i.i.d. uniform points in box^d stacked into a dn vector. When `adjacency`
// is given, configurations with an adjacent pair closer than the collocation
// tolerance are resampled.
Eigen::VectorXd random_configuration(int n, int d, Box box, std::uint64_t seed,
                                     const Graph* adjacency = nullptr);
Eigen::VectorXd random_configuration(int n, int d, Box box, std::mt19937_64& rng,
                                     const Graph* adjacency = nullptr);

}  // namespace bearing
