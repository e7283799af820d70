#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "bearing/sim.hpp"
#include "json.hpp"

namespace bearing::cli {

inline constexpr int kReportSchemaVersion = 1;

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitInfeasible = 3,
  kExitRuntimeEvent = 4,
};

// 64-bit FNV-1a of a byte string, rendered as "fnv1a64:<16 hex digits>".
std::string fnv1a_digest(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

// Machine-readable record of one CLI run. Sections are plain JSON objects
// that commands fill in; serialization keeps insertion order.
struct RunReport {
  std::vector<std::string> command;
  std::string subcommand;
  nlohmann::ordered_json input = nullptr;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json verdicts = nlohmann::ordered_json::object();
  nlohmann::ordered_json ranks = nlohmann::ordered_json::object();
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  std::vector<std::string> outputs;
  nlohmann::ordered_json error = nullptr;
  int exit_code = kExitOk;

  void add_events(const Trajectory& traj, const std::string& run_label = "");
  // Exit code implied by the recorded events (0 when none is an error).
  int event_exit_code() const;
  nlohmann::ordered_json to_json() const;
};

int exit_code_for(EventKind kind);

nlohmann::ordered_json vector_json(const Eigen::VectorXd& v);
// Splits a stacked dn vector into per-node objects {"id": i + 1, "value": [...]}.
nlohmann::ordered_json per_node_json(const Eigen::VectorXd& v, int d, const std::vector<int>& nodes);

// printf("%.17g")
std::string format_double(double x);

// CSV with header t, state labels, metric names; one row per recorded step.
void write_trajectory_csv(const Trajectory& traj, const std::vector<std::string>& state_labels,
                          const std::filesystem::path& path);
void write_trajectory_json(const Trajectory& traj, const std::vector<std::string>& state_labels,
                           const std::filesystem::path& path);
// Picks the writer from format ("csv" | "json"); returns the written path.
std::filesystem::path write_trajectory(const Trajectory& traj, const std::vector<std::string>& state_labels,
                                       const std::filesystem::path& dir, const std::string& stem,
                                       const std::string& format);

void write_json(const nlohmann::ordered_json& doc, const std::filesystem::path& path);

}  // namespace bearing::cli
