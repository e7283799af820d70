#include "bearing/cli/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bearing/errors.hpp"

namespace bearing::cli {

using nlohmann::ordered_json;

std::string fnv1a_digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a_digest(buf.str());
}

int exit_code_for(EventKind kind) {
  switch (kind) {
    case EventKind::converged: return kExitOk;
    case EventKind::singular_gain: return kExitInfeasible;
    case EventKind::collocation:
    case EventKind::non_finite: return kExitRuntimeEvent;
  }
  return kExitRuntimeEvent;
}

void RunReport::add_events(const Trajectory& traj, const std::string& run_label) {
  for (const Event& e : traj.events) {
    ordered_json ev;
    if (!run_label.empty()) ev["run"] = run_label;
    ev["kind"] = to_string(e.kind);
    ev["time"] = e.time;
    ev["detail"] = e.detail;
    ev["error"] = exit_code_for(e.kind) != kExitOk;
    events.push_back(std::move(ev));
  }
}

int RunReport::event_exit_code() const {
  int code = kExitOk;
  for (const auto& ev : events) {
    const std::string kind = ev.value("kind", "");
    int c = kExitOk;
    if (kind == "singular_gain") c = kExitInfeasible;
    if (kind == "collocation" || kind == "non_finite") c = kExitRuntimeEvent;
    if (c != kExitOk && (code == kExitOk || c < code)) code = c;
  }
  return code;
}

ordered_json RunReport::to_json() const {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["tool"] = "bearingkit";
  doc["command"] = command;
  doc["subcommand"] = subcommand;
  doc["input"] = input;
  doc["config"] = config;
  doc["verdicts"] = verdicts;
  doc["ranks"] = ranks;
  doc["metrics"] = metrics;
  if (!details.empty()) doc["details"] = details;
  doc["events"] = events;
  doc["outputs"] = outputs;
  doc["error"] = error;
  doc["exit_code"] = exit_code;
  return doc;
}

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index c = 0; c < v.size(); ++c) out.push_back(v(c));
  return out;
}

ordered_json per_node_json(const Eigen::VectorXd& v, int d, const std::vector<int>& nodes) {
  ordered_json out = ordered_json::array();
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    out.push_back({{"id", nodes[s] + 1},
                   {"value", vector_json(v.segment(static_cast<Eigen::Index>(s) * d, d))}});
  }
  return out;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_csv(const Trajectory& traj, const std::vector<std::string>& state_labels,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << 't';
  for (const auto& l : state_labels) out << ',' << l;
  for (const auto& m : traj.metric_names) out << ',' << m;
  out << '\n';
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    out << format_double(traj.times[r]);
    const State& x = traj.states[r];
    for (Eigen::Index c = 0; c < x.size(); ++c) out << ',' << format_double(x(c));
    if (r < traj.metrics.size()) {
      for (double v : traj.metrics[r]) out << ',' << format_double(v);
    }
    out << '\n';
  }
}

void write_trajectory_json(const Trajectory& traj, const std::vector<std::string>& state_labels,
                           const std::filesystem::path& path) {
  ordered_json doc;
  doc["state_labels"] = state_labels;
  doc["metric_names"] = traj.metric_names;
  doc["times"] = traj.times;
  ordered_json states = ordered_json::array();
  for (const auto& x : traj.states) states.push_back(vector_json(x));
  doc["states"] = std::move(states);
  doc["metrics"] = traj.metrics;
  write_json(doc, path);
}

std::filesystem::path write_trajectory(const Trajectory& traj, const std::vector<std::string>& state_labels,
                                       const std::filesystem::path& dir, const std::string& stem,
                                       const std::string& format) {
  if (format == "json") {
    const auto path = dir / (stem + ".json");
    write_trajectory_json(traj, state_labels, path);
    return path;
  }
  const auto path = dir / (stem + ".csv");
  write_trajectory_csv(traj, state_labels, path);
  return path;
}

void write_json(const ordered_json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace bearing::cli
