#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bearing/graph.hpp"
#include "json.hpp"

namespace bearing::cli {

enum class Role { anchor, leader, follower, agent };

std::string to_string(Role role);

struct NodeSpec {
  int id = 0;  // 1-based as in the file
  std::optional<Eigen::VectorXd> position;
  Role role = Role::agent;
  std::optional<double> heading;
};

// One supplied bearing on the 0-based ordered pair (i, j).
struct BearingSpec {
  int i = 0;
  int j = 0;
  Eigen::VectorXd g;
};

// In-memory form of the JSON network document. Node ids are stored 1-based
// in NodeSpec::id but every index in edges and bearings is 0-based.
struct NetworkFile {
  int dimension = 2;
  std::vector<NodeSpec> nodes;  // sorted by id
  std::vector<std::pair<int, int>> edges;
  std::optional<std::vector<BearingSpec>> bearings;
  std::optional<std::vector<BearingSpec>> target_bearings;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  bool has_positions() const;
  // Stacked positions; throws InputError when any node lacks one.
  Eigen::VectorXd positions() const;
  // Headings with missing entries set to zero.
  Eigen::VectorXd headings() const;
  // 0-based ids with the given role, ascending.
  std::vector<int> with_role(Role role) const;
  // Undirected graph on the listed edges (directed duplicates collapse).
  Graph graph() const;
};

// Parses a JSON document. Syntax errors report line and column; schema errors
// name the offending field path (e.g. nodes[2].position). Throws InputError.
NetworkFile parse_network_file(const std::string& text, const std::string& origin = "<input>");
NetworkFile read_network_file(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const NetworkFile& file);
void write_network_file(const NetworkFile& file, const std::filesystem::path& path);

// Unit norm tolerance for supplied bearing vectors.
inline constexpr double kBearingNormTolerance = 1e-6;

// Bearings stacked per canonical edge of `g` (i < j); a spec given as (j, i)
// is negated. Throws InputError for missing, extra or non-unit bearings.
Eigen::VectorXd stack_bearings(const Graph& g, int d, const std::vector<BearingSpec>& specs,
                               const std::string& field);

}  // namespace bearing::cli
