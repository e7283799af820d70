#include "bearing/cli/network_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bearing/errors.hpp"

namespace bearing::cli {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Role role) {
  switch (role) {
    case Role::anchor: return "anchor";
    case Role::leader: return "leader";
    case Role::follower: return "follower";
    case Role::agent: return "agent";
  }
  return "agent";
}

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& path, const std::string& msg) {
  throw InputError(origin + ": " + path + ": " + msg);
}

const json& require(const json& obj, const char* key, const std::string& origin, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(origin, path, std::string("missing required field '") + key + "'");
  return *it;
}

int as_int(const json& v, const std::string& origin, const std::string& path) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (x == std::floor(x) && std::abs(x) < 1e9) return static_cast<int>(x);
  }
  fail(origin, path, "expected an integer, got " + v.dump());
}

Eigen::VectorXd as_vector(const json& v, int d, const std::string& origin, const std::string& path) {
  if (!v.is_array()) fail(origin, path, "expected an array of " + std::to_string(d) + " numbers");
  if (static_cast<int>(v.size()) != d) {
    fail(origin, path, "expected " + std::to_string(d) + " numbers, got " + std::to_string(v.size()));
  }
  Eigen::VectorXd out(d);
  for (int c = 0; c < d; ++c) {
    if (!v[c].is_number()) fail(origin, path + "[" + std::to_string(c) + "]", "expected a number");
    out(c) = v[c].get<double>();
    if (!std::isfinite(out(c))) fail(origin, path + "[" + std::to_string(c) + "]", "non-finite value");
  }
  return out;
}

std::pair<int, int> as_pair(const json& v, int n, const std::string& origin, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(origin, path, "expected a pair [i, j] of node ids");
  const int i = as_int(v[0], origin, path + "[0]");
  const int j = as_int(v[1], origin, path + "[1]");
  for (int id : {i, j}) {
    if (id < 1 || id > n) fail(origin, path, "node id " + std::to_string(id) + " out of range 1.." + std::to_string(n));
  }
  if (i == j) fail(origin, path, "self-loop on node " + std::to_string(i));
  return {i - 1, j - 1};
}

Role parse_role(const json& v, const std::string& origin, const std::string& path) {
  if (!v.is_string()) fail(origin, path, "expected a string");
  const std::string s = v.get<std::string>();
  if (s == "anchor") return Role::anchor;
  if (s == "leader") return Role::leader;
  if (s == "follower") return Role::follower;
  if (s == "agent") return Role::agent;
  fail(origin, path, "unknown role '" + s + "' (expected anchor, leader, follower or agent)");
}

std::vector<BearingSpec> parse_bearings(const json& arr, int d, int n, const std::string& origin,
                                        const std::string& field) {
  if (!arr.is_array()) fail(origin, field, "expected an array");
  std::vector<BearingSpec> out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string path = field + "[" + std::to_string(k) + "]";
    if (!arr[k].is_object()) fail(origin, path, "expected an object with 'edge' and 'g'");
    const auto [i, j] = as_pair(require(arr[k], "edge", origin, path), n, origin, path + ".edge");
    BearingSpec spec{i, j, as_vector(require(arr[k], "g", origin, path), d, origin, path + ".g")};
    if (std::abs(spec.g.norm() - 1.0) > kBearingNormTolerance) {
      fail(origin, path + ".g", "bearing is not unit norm (|g| = " + std::to_string(spec.g.norm()) + ")");
    }
    out.push_back(std::move(spec));
  }
  return out;
}

std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index c = 0; c < v.size(); ++c) out.push_back(v(c));
  return out;
}

ordered_json bearings_json(const std::vector<BearingSpec>& specs) {
  ordered_json out = ordered_json::array();
  for (const auto& s : specs) {
    out.push_back({{"edge", {s.i + 1, s.j + 1}}, {"g", vector_json(s.g)}});
  }
  return out;
}

}  // namespace

NetworkFile parse_network_file(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": malformed JSON at " + locate(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) fail(origin, "$", "expected a JSON object");

  NetworkFile file;
  file.dimension = as_int(require(doc, "dimension", origin, "$"), origin, "dimension");
  if (file.dimension < 2) fail(origin, "dimension", "must be >= 2");

  const json& nodes = require(doc, "nodes", origin, "$");
  if (!nodes.is_array() || nodes.empty()) fail(origin, "nodes", "expected a nonempty array");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::string path = "nodes[" + std::to_string(k) + "]";
    const json& node = nodes[k];
    if (!node.is_object()) fail(origin, path, "expected an object");
    NodeSpec spec;
    spec.id = as_int(require(node, "id", origin, path), origin, path + ".id");
    if (const auto it = node.find("position"); it != node.end()) {
      spec.position = as_vector(*it, file.dimension, origin, path + ".position");
    }
    if (const auto it = node.find("role"); it != node.end()) {
      spec.role = parse_role(*it, origin, path + ".role");
    }
    if (const auto it = node.find("heading"); it != node.end()) {
      if (!it->is_number()) fail(origin, path + ".heading", "expected a number (radians)");
      spec.heading = it->get<double>();
    }
    file.nodes.push_back(std::move(spec));
  }
  std::sort(file.nodes.begin(), file.nodes.end(),
            [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });
  for (int k = 0; k < file.num_nodes(); ++k) {
    if (file.nodes[k].id != k + 1) {
      fail(origin, "nodes", "ids must be unique and contiguous from 1 (missing or repeated id " +
                                std::to_string(k + 1) + ")");
    }
  }
  const bool any_position = std::any_of(file.nodes.begin(), file.nodes.end(),
                                        [](const NodeSpec& s) { return s.position.has_value(); });
  if (any_position) {
    for (const auto& s : file.nodes) {
      if (!s.position) fail(origin, "nodes", "node " + std::to_string(s.id) + " has no position");
    }
  }

  if (const auto it = doc.find("edges"); it != doc.end()) {
    if (!it->is_array()) fail(origin, "edges", "expected an array of [i, j] pairs");
    for (std::size_t k = 0; k < it->size(); ++k) {
      file.edges.push_back(as_pair((*it)[k], file.num_nodes(), origin, "edges[" + std::to_string(k) + "]"));
    }
  }
  if (const auto it = doc.find("bearings"); it != doc.end()) {
    file.bearings = parse_bearings(*it, file.dimension, file.num_nodes(), origin, "bearings");
  }
  if (const auto it = doc.find("target_bearings"); it != doc.end()) {
    file.target_bearings = parse_bearings(*it, file.dimension, file.num_nodes(), origin, "target_bearings");
  }
  return file;
}

NetworkFile read_network_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open network file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network_file(buf.str(), path.string());
}

bool NetworkFile::has_positions() const {
  return !nodes.empty() && nodes.front().position.has_value();
}

Eigen::VectorXd NetworkFile::positions() const {
  if (!has_positions()) throw InputError("network file has no node positions");
  Eigen::VectorXd p(static_cast<Eigen::Index>(num_nodes()) * dimension);
  for (int i = 0; i < num_nodes(); ++i) p.segment(i * dimension, dimension) = *nodes[i].position;
  return p;
}

Eigen::VectorXd NetworkFile::headings() const {
  Eigen::VectorXd psi(num_nodes());
  for (int i = 0; i < num_nodes(); ++i) psi(i) = nodes[i].heading.value_or(0.0);
  return psi;
}

std::vector<int> NetworkFile::with_role(Role role) const {
  std::vector<int> out;
  for (int i = 0; i < num_nodes(); ++i) {
    if (nodes[i].role == role) out.push_back(i);
  }
  return out;
}

Graph NetworkFile::graph() const { return Graph(num_nodes(), edges); }

ordered_json to_json(const NetworkFile& file) {
  ordered_json doc;
  doc["dimension"] = file.dimension;
  ordered_json nodes = ordered_json::array();
  for (const auto& n : file.nodes) {
    ordered_json node;
    node["id"] = n.id;
    if (n.position) node["position"] = vector_json(*n.position);
    node["role"] = to_string(n.role);
    if (n.heading) node["heading"] = *n.heading;
    nodes.push_back(std::move(node));
  }
  doc["nodes"] = std::move(nodes);
  ordered_json edges = ordered_json::array();
  for (const auto& [i, j] : file.edges) edges.push_back({i + 1, j + 1});
  doc["edges"] = std::move(edges);
  if (file.bearings) doc["bearings"] = bearings_json(*file.bearings);
  if (file.target_bearings) doc["target_bearings"] = bearings_json(*file.target_bearings);
  return doc;
}

void write_network_file(const NetworkFile& file, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << to_json(file).dump(2) << '\n';
}

Eigen::VectorXd stack_bearings(const Graph& g, int d, const std::vector<BearingSpec>& specs,
                               const std::string& field) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(g.num_edges()) * d);
  std::vector<bool> seen(static_cast<std::size_t>(g.num_edges()), false);
  for (const auto& s : specs) {
    const auto k = g.edge_index(s.i, s.j);
    if (!k) {
      throw InputError(field + ": bearing on [" + std::to_string(s.i + 1) + ", " + std::to_string(s.j + 1) +
                       "] which is not an edge");
    }
    const Eigen::VectorXd unit = s.g / s.g.norm();
    const Eigen::VectorXd oriented = s.i < s.j ? unit : Eigen::VectorXd(-unit);
    if (seen[*k]) {
      if ((out.segment(*k * d, d) - oriented).norm() > kBearingNormTolerance) {
        throw InputError(field + ": conflicting bearings for edge [" + std::to_string(s.i + 1) + ", " +
                         std::to_string(s.j + 1) + "] (g_ij must equal -g_ji)");
      }
      continue;
    }
    seen[*k] = true;
    out.segment(*k * d, d) = oriented;
  }
  for (int k = 0; k < g.num_edges(); ++k) {
    if (!seen[k]) {
      const Edge& e = g.edges()[k];
      throw InputError(field + ": no bearing given for edge [" + std::to_string(e.first + 1) + ", " +
                       std::to_string(e.second + 1) + "]");
    }
  }
  return out;
}

}  // namespace bearing::cli
