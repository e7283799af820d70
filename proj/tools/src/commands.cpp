#include "bearing/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "bearing/cli/network_file.hpp"
#include "bearing/errors.hpp"
#include "bearing/graph.hpp"
#include "bearing/localization.hpp"

namespace bearing::cli {

using nlohmann::ordered_json;

namespace {

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw InputError(what + ": '" + item + "' is not a number");
    }
  }
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<int> all_nodes(int n) {
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = i;
  return out;
}

std::vector<int> one_based(const std::vector<int>& ids) {
  std::vector<int> out;
  for (int i : ids) out.push_back(i + 1);
  return out;
}

void describe_input(RunReport& report, const std::filesystem::path& path) {
  report.input = {{"path", path.string()}, {"digest", file_digest(path)}};
}

Box bounding_box(const Eigen::VectorXd& p) {
  Box box{p.minCoeff(), p.maxCoeff()};
  if (!(box.hi > box.lo)) {
    box.lo -= 0.5;
    box.hi += 0.5;
  }
  return box;
}

std::string axis_label(int c, int d) {
  if (d <= 3) return std::string(1, "xyz"[c]);
  return std::to_string(c + 1);
}

std::vector<std::string> position_labels(const std::vector<int>& nodes, int d) {
  std::vector<std::string> out;
  for (int i : nodes) {
    for (int c = 0; c < d; ++c) out.push_back("p" + std::to_string(i + 1) + "_" + axis_label(c, d));
  }
  return out;
}

ordered_json rigidity_json(const RigidityReport& rep, int d, int n) {
  ordered_json out;
  out["rank"] = rep.rank;
  out["expected_rank"] = rep.expected_rank;
  out["nullity"] = rep.nullity;
  out["verdict"] = to_string(rep.verdict);
  out["singular_values"] = vector_json(rep.singular_values);
  if (rep.witness) {
    out["witness"] = per_node_json(*rep.witness, d, all_nodes(n));
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

ordered_json laman_json(const LamanCertificate& cert, int n) {
  ordered_json out;
  out["laman"] = cert.laman;
  out["edge_count_ok"] = cert.edge_count_ok;
  out["algorithm"] = n <= kExhaustiveLamanLimit ? "exhaustive" : "pebble_game";
  if (cert.violating_subset) {
    out["violating_subset"] = one_based(*cert.violating_subset);
  } else {
    out["violating_subset"] = nullptr;
  }
  return out;
}

void add_localizability(RunReport& report, const AnchoredNetwork& an) {
  const LocalizabilityReport loc = is_bearing_localizable(an);
  report.verdicts["localizable"] = loc.localizable;
  report.verdicts["anchor_bound_satisfied"] = loc.anchor_bound_satisfied;
  report.verdicts["anchor_free_motion"] = loc.anchor_free_motion;
  report.ranks["laplacian_nullity"] = loc.laplacian_nullity;
  report.metrics["num_anchors"] = loc.num_anchors;
  report.metrics["anchor_bound"] = loc.anchor_bound;
  report.metrics["lff_sigma_min"] = loc.sigma_min;
  report.metrics["lff_sigma_max"] = loc.sigma_max;
  report.details["anchors"] = one_based(an.anchors());
  if (loc.anchor_free_witness) {
    report.details["anchor_free_witness"] = per_node_json(*loc.anchor_free_witness, an.dimension(), an.followers());
  }
}

void analyze_bearing_or_distance(const NetworkFile& file, bool bearing_mode, RunReport& report) {
  const Network net(file.graph(), file.dimension, file.positions());
  const int d = net.dimension();
  const int n = net.num_nodes();
  const RigidityReport rep =
      bearing_mode ? is_infinitesimally_bearing_rigid(net) : is_infinitesimally_distance_rigid(net);
  const std::string key = bearing_mode ? "infinitesimally_bearing_rigid" : "infinitesimally_distance_rigid";
  report.verdicts[key] = rep.rigid();
  report.verdicts["laman"] = is_laman(net.graph()).laman;
  report.ranks[bearing_mode ? "bearing_rigidity_matrix" : "distance_rigidity_matrix"] = rep.rank;
  report.ranks["expected"] = rep.expected_rank;
  report.ranks["nullity"] = rep.nullity;
  report.details["rigidity"] = rigidity_json(rep, d, n);
  if (bearing_mode) {
    report.ranks["bearing_laplacian"] = numeric_rank(bearing_laplacian(net));
    report.details["trivial_basis_degenerate"] = trivial_bearing_motion_basis(net).degenerate;
    if (!file.with_role(Role::anchor).empty()) {
      add_localizability(report, AnchoredNetwork(net, file.with_role(Role::anchor)));
    }
  }
}

void analyze_se2(const NetworkFile& file, RunReport& report) {
  if (file.dimension != 2) throw InputError("se2 mode requires dimension 2");
  std::vector<Arc> arcs;
  for (const auto& [i, j] : file.edges) arcs.push_back({i, j});
  const SE2Network net(file.num_nodes(), arcs, file.positions(), file.headings());
  const RigidityReport rep = is_se2_infinitesimally_rigid(net);
  const Eigen::MatrixXd r = se2_rigidity_matrix(net);
  const Eigen::MatrixXd trivial = se2_trivial_motions(net);
  report.verdicts["se2_infinitesimally_rigid"] = rep.rigid();
  report.ranks["se2_rigidity_matrix"] = rep.rank;
  report.ranks["expected"] = rep.expected_rank;
  report.ranks["nullity"] = rep.nullity;
  ordered_json residuals = ordered_json::array();
  for (Eigen::Index c = 0; c < trivial.cols(); ++c) residuals.push_back((r * trivial.col(c)).norm());
  report.metrics["trivial_motion_residuals"] = residuals;
  ordered_json rig;
  rig["rank"] = rep.rank;
  rig["expected_rank"] = rep.expected_rank;
  rig["nullity"] = rep.nullity;
  rig["verdict"] = to_string(rep.verdict);
  rig["singular_values"] = vector_json(rep.singular_values);
  if (rep.witness) {
    const int n = net.num_nodes();
    ordered_json w = ordered_json::array();
    for (int i = 0; i < n; ++i) {
      w.push_back({{"id", i + 1},
                   {"position", vector_json(rep.witness->segment(2 * i, 2))},
                   {"heading", (*rep.witness)(2 * n + i)}});
    }
    rig["witness"] = std::move(w);
  } else {
    rig["witness"] = nullptr;
  }
  report.details["rigidity"] = std::move(rig);
  report.details["num_arcs"] = net.num_arcs();
}

void analyze_generic(const NetworkFile& file, int trials, std::uint64_t seed, RunReport& report) {
  const Graph g = file.graph();
  const GenericRigidityReport rep = is_generically_bearing_rigid(g, file.dimension, trials, seed);
  report.verdicts["generically_bearing_rigid"] = to_string(rep.verdict);
  const LamanCertificate cert = is_laman(g);
  report.verdicts["laman"] = cert.laman;
  report.metrics["trials"] = rep.trials;
  report.metrics["trials_used"] = rep.trials_used;
  report.metrics["seed"] = rep.seed;
  report.details["laman"] = laman_json(cert, g.num_vertices());
  if (rep.certificate) {
    report.details["certificate"] = per_node_json(*rep.certificate, file.dimension, all_nodes(g.num_vertices()));
  }
}

}  // namespace

Gains parse_gains(const std::string& text) {
  const std::vector<double> v = parse_numbers(text, "--gains");
  if (v.size() != 3) throw InputError("--gains expects kp,ki,kv");
  Gains g{v[0], v[1], v[2]};
  g.validate();
  return g;
}

LeaderMotion parse_leader_motion(const std::string& text, int d) {
  if (text == "none" || text == "stationary") return LeaderMotion::stationary(d);
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("--leader-motion: expected none, const:... or sine:...");
  const std::string kind = text.substr(0, colon);
  const std::vector<double> v = parse_numbers(text.substr(colon + 1), "--leader-motion");
  if (kind == "const") {
    if (static_cast<int>(v.size()) != d) {
      throw InputError("--leader-motion const needs " + std::to_string(d) + " velocity components");
    }
    return LeaderMotion::constant(to_vector(v));
  }
  if (kind == "sine") {
    if (v.size() == 3) {
      return LeaderMotion::sinusoid(Eigen::VectorXd::Constant(d, v[0]), Eigen::VectorXd::Constant(d, v[1]),
                                    Eigen::VectorXd::Constant(d, v[2]));
    }
    if (static_cast<int>(v.size()) == 3 * d) {
      const Eigen::VectorXd all = to_vector(v);
      return LeaderMotion::sinusoid(all.segment(0, d), all.segment(d, d), all.segment(2 * d, d));
    }
    throw InputError("--leader-motion sine needs amp,freq,phase (3 or 3*d values)");
  }
  throw InputError("--leader-motion: unknown kind '" + kind + "'");
}

void run_analyze(const AnalyzeOptions& opts, const CommonOptions& common, RunReport& report) {
  describe_input(report, opts.input);
  report.config["mode"] = opts.mode;
  const NetworkFile file = read_network_file(opts.input);
  report.details["num_nodes"] = file.num_nodes();
  report.details["dimension"] = file.dimension;
  if (opts.mode == "bearing") {
    analyze_bearing_or_distance(file, true, report);
  } else if (opts.mode == "distance") {
    analyze_bearing_or_distance(file, false, report);
  } else if (opts.mode == "se2") {
    analyze_se2(file, report);
  } else if (opts.mode == "generic") {
    report.config["trials"] = opts.trials;
    analyze_generic(file, opts.trials, common.sim.seed, report);
  } else {
    throw InputError("unknown analysis mode '" + opts.mode + "'");
  }
}

namespace {

struct LocalizeBatchResult {
  LocalizationRun run;
  std::filesystem::path path;
};

}  // namespace

void run_localize(const LocalizeOptions& opts, const CommonOptions& common, RunReport& report) {
  if (opts.solve == opts.simulate) throw InputError("choose exactly one of --solve or --simulate");
  if (opts.init != "random" && opts.init != "file") throw InputError("--init must be random or file");
  describe_input(report, opts.input);
  report.config["mode"] = opts.solve ? "solve" : "simulate";
  const NetworkFile file = read_network_file(opts.input);
  const std::vector<int> anchors = file.with_role(Role::anchor);
  if (anchors.empty()) throw InputError("localization needs at least one node with role 'anchor'");
  Network net(file.graph(), file.dimension, file.positions());
  const AnchoredNetwork an =
      file.bearings ? AnchoredNetwork(net, anchors,
                                      stack_bearings(net.graph(), file.dimension, *file.bearings, "bearings"))
                    : AnchoredNetwork(net, anchors);
  const int d = an.dimension();
  report.details["bearings"] = an.bearings_from_truth() ? "from_positions" : "measured";
  report.ranks["bearing_laplacian"] = numeric_rank(an.laplacian());
  report.ranks["ibr_expected"] = d * file.num_nodes() - d - 1;
  add_localizability(report, an);
  const bool localizable = report.verdicts["localizable"].get<bool>();

  if (opts.solve) {
    if (!localizable) {
      std::ostringstream msg;
      msg << "network is not bearing localizable: L_ff is singular; anchors n_a = " << anchors.size()
          << ", necessary bound n_a >= dim Null(L)/d = " << report.metrics["anchor_bound"].get<double>()
          << (report.verdicts["anchor_bound_satisfied"].get<bool>() ? " (satisfied)" : " (violated)");
      throw InfeasibleError(msg.str());
    }
    const LocalizationSolution sol = solve_localization(an);
    report.metrics["objective"] = sol.objective;
    report.metrics["condition_number"] = sol.condition_number;
    if (an.bearings_from_truth()) {
      report.metrics["max_error"] =
          an.followers().empty() ? 0.0 : (sol.followers - an.follower_positions()).cwiseAbs().maxCoeff();
    }
    report.details["followers"] = per_node_json(sol.followers, d, an.followers());
    const Eigen::VectorXd full = assemble_estimate(an, sol.followers, an.anchor_positions());
    std::filesystem::path out;
    if (common.format == "json") {
      ordered_json doc = ordered_json::array();
      for (int i = 0; i < file.num_nodes(); ++i) {
        doc.push_back({{"id", i + 1},
                       {"role", to_string(file.nodes[i].role)},
                       {"position", vector_json(full.segment(i * d, d))}});
      }
      out = common.output_dir / "positions.json";
      write_json(doc, out);
    } else {
      out = common.output_dir / "positions.csv";
      std::ofstream csv(out);
      if (!csv) throw InputError("cannot write " + out.string());
      csv << "id,role";
      for (int c = 0; c < d; ++c) csv << ',' << axis_label(c, d);
      csv << '\n';
      for (int i = 0; i < file.num_nodes(); ++i) {
        csv << i + 1 << ',' << to_string(file.nodes[i].role);
        for (int c = 0; c < d; ++c) csv << ',' << format_double(full(i * d + c));
        csv << '\n';
      }
    }
    report.outputs.push_back(out.string());
    return;
  }

  const Box box = bounding_box(net.positions());
  const auto nf = static_cast<Eigen::Index>(an.followers().size()) * d;
  const std::vector<std::string> labels = position_labels(an.followers(), d);
  std::vector<std::future<LocalizeBatchResult>> jobs;
  for (int b = 0; b < common.batch; ++b) {
    jobs.push_back(std::async(std::launch::async, [&, b] {
      SimConfig cfg = common.sim;
      cfg.seed = common.sim.seed + static_cast<std::uint64_t>(b);
      const Eigen::VectorXd init = opts.init == "file"
                                       ? an.follower_positions()
                                       : random_configuration(static_cast<int>(an.followers().size()), d, box,
                                                              cfg.seed);
      LocalizeBatchResult res;
      res.run = simulate_localization(an, nf == 0 ? Eigen::VectorXd(0) : init, cfg);
      const std::string stem = common.batch == 1 ? "trajectory" : "trajectory_" + std::to_string(b + 1);
      res.path = write_trajectory(res.run.trajectory, labels, common.output_dir, stem, common.format);
      return res;
    }));
  }
  ordered_json runs = ordered_json::array();
  double worst = 0.0;
  for (int b = 0; b < common.batch; ++b) {
    LocalizeBatchResult res = jobs[b].get();
    const Trajectory& traj = res.run.trajectory;
    ordered_json r;
    r["seed"] = common.sim.seed + static_cast<std::uint64_t>(b);
    r["final_time"] = traj.final_time();
    r["final_objective"] = traj.metrics.back().front();
    if (res.run.has_truth) {
      r["final_max_error"] = res.run.final_max_error;
      r["final_errors"] = per_node_json(res.run.final_errors, 1, an.followers());
      worst = std::max(worst, res.run.final_max_error);
    }
    r["trajectory"] = res.path.string();
    runs.push_back(std::move(r));
    report.add_events(traj, common.batch == 1 ? "" : std::to_string(b + 1));
    report.outputs.push_back(res.path.string());
  }
  report.metrics["final_objective"] = runs.front()["final_objective"];
  report.metrics["final_time"] = runs.front()["final_time"];
  if (an.bearings_from_truth()) report.metrics["final_max_error"] = worst;
  report.details["runs"] = std::move(runs);
}

namespace {

struct FormationBatchResult {
  FormationRun run;
  std::filesystem::path path;
};

double max_edge_deviation(const TargetFormation& tf, const Eigen::VectorXd& p, bool sign_invariant) {
  const int d = tf.dimension();
  const Eigen::VectorXd g = bearing_function(tf.graph(), d, p);
  double worst = 0.0;
  for (int k = 0; k < tf.graph().num_edges(); ++k) {
    const Eigen::VectorXd gk = g.segment(k * d, d);
    const Eigen::VectorXd gs = tf.desired_bearings().segment(k * d, d);
    double dev = (gk - gs).norm();
    if (sign_invariant) dev = std::min(dev, (gk + gs).norm());
    worst = std::max(worst, dev);
  }
  return worst;
}

double nan_if_collocated(const std::function<double()>& fn) {
  try {
    return fn();
  } catch (const CollocationError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

void run_formation(const FormationOptions& opts, const CommonOptions& common, RunReport& report) {
  if (opts.init != "random" && opts.init != "file") throw InputError("--init must be random or file");
  describe_input(report, opts.input);
  const Law law = parse_law(opts.law);
  opts.gains.validate();
  report.config["law"] = to_string(law);
  report.config["gains"] = {{"kp", opts.gains.kp}, {"ki", opts.gains.ki}, {"kv", opts.gains.kv}};
  report.config["leader_motion"] = opts.leader_motion;
  report.config["init"] = opts.init;

  const NetworkFile file = read_network_file(opts.input);
  if (!file.target_bearings) throw InputError(opts.input.string() + ": formation needs 'target_bearings'");
  const int d = file.dimension;
  const Graph g = file.graph();
  const TargetFormation tf(g, d, stack_bearings(g, d, *file.target_bearings, "target_bearings"),
                           file.with_role(Role::leader));
  const LeaderMotion motion = parse_leader_motion(opts.leader_motion, d);

  const int expected = d * tf.num_agents() - d - 1;
  const int lap_rank = numeric_rank(tf.laplacian());
  report.ranks["target_laplacian"] = lap_rank;
  report.ranks["expected"] = expected;
  report.verdicts["target_infinitesimally_bearing_rigid"] = lap_rank == expected;
  if (tf.has_leaders()) {
    report.verdicts["target_localizable"] = tf.localizable();
    report.details["leaders"] = one_based(tf.leaders());
  }

  const Eigen::VectorXd file_positions = file.positions();
  const Box box = bounding_box(file_positions);
  std::vector<std::future<FormationBatchResult>> jobs;
  for (int b = 0; b < common.batch; ++b) {
    jobs.push_back(std::async(std::launch::async, [&, b] {
      SimConfig cfg = common.sim;
      cfg.seed = common.sim.seed + static_cast<std::uint64_t>(b);
      FormationInit init;
      if (opts.init == "file") {
        init.positions = file_positions;
        init.headings = file.headings();
      } else {
        std::mt19937_64 rng(cfg.seed);
        init.positions = random_configuration(tf.num_agents(), d, box, rng, &tf.graph());
        std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
        Eigen::VectorXd headings(tf.num_agents());
        for (Eigen::Index i = 0; i < headings.size(); ++i) headings(i) = angle(rng);
        init.headings = headings;
        if (tf.has_leaders()) {
          for (int l : tf.leaders()) init.positions.segment(l * d, d) = file_positions.segment(l * d, d);
        }
      }
      FormationBatchResult res;
      res.run = simulate_formation(tf, law, init, opts.gains, motion, cfg);
      const std::string stem = common.batch == 1 ? "trajectory" : "trajectory_" + std::to_string(b + 1);
      res.path = write_trajectory(res.run.trajectory, res.run.state_labels, common.output_dir, stem,
                                  common.format);
      return res;
    }));
  }

  ordered_json runs = ordered_json::array();
  for (int b = 0; b < common.batch; ++b) {
    FormationBatchResult res = jobs[b].get();
    const Trajectory& traj = res.run.trajectory;
    const Eigen::VectorXd p0 = res.run.positions(traj.states.front());
    const Eigen::VectorXd pT = res.run.positions(traj.final_state());
    const FormationMetrics m0 = formation_metrics(tf, p0);
    const FormationMetrics mT = formation_metrics(tf, pT);
    ordered_json r;
    r["seed"] = common.sim.seed + static_cast<std::uint64_t>(b);
    r["final_time"] = traj.final_time();
    r["initial_bearing_error"] = m0.bearing_error;
    r["final_bearing_error"] = mT.bearing_error;
    r["final_bearing_error_pm"] = nan_if_collocated([&] { return sign_invariant_bearing_error(tf, pT); });
    r["final_max_edge_deviation"] = nan_if_collocated([&] { return max_edge_deviation(tf, pT, false); });
    r["final_max_edge_deviation_pm"] = nan_if_collocated([&] { return max_edge_deviation(tf, pT, true); });
    r["final_phi1"] = nan_if_collocated([&] { return phi1(tf, pT); });
    r["final_phi2"] = nan_if_collocated([&] { return phi2(tf, pT); });
    r["centroid_drift"] = (mT.centroid - m0.centroid).norm();
    r["scale_drift"] = std::abs(mT.scale - m0.scale);
    r["final_centroid"] = vector_json(mT.centroid);
    r["final_scale"] = mT.scale;
    if (law == Law::si_vel) {
      const std::vector<double> eps = traj.metric("eps_norm");
      r["initial_eps_norm"] = eps.front();
      r["final_eps_norm"] = eps.back();
    }
    r["trajectory"] = res.path.string();
    runs.push_back(std::move(r));
    report.add_events(traj, common.batch == 1 ? "" : std::to_string(b + 1));
    report.outputs.push_back(res.path.string());
  }
  for (const auto& [key, value] : runs.front().items()) {
    if (key != "trajectory" && key != "seed") report.metrics[key] = value;
  }
  if (common.batch > 1) report.details["runs"] = std::move(runs);
}

void run_construct(const ConstructOptions& opts, const CommonOptions& common, RunReport& report) {
  if (opts.henneberg.has_value() == opts.laman_check.has_value()) {
    throw InputError("choose exactly one of --henneberg N or --laman-check FILE");
  }
  if (opts.laman_check) {
    describe_input(report, *opts.laman_check);
    report.config["mode"] = "laman_check";
    const NetworkFile file = read_network_file(*opts.laman_check);
    const Graph g = file.graph();
    const LamanCertificate cert = is_laman(g);
    report.verdicts["laman"] = cert.laman;
    report.metrics["num_nodes"] = g.num_vertices();
    report.metrics["num_edges"] = g.num_edges();
    report.metrics["laman_edge_count"] = 2 * g.num_vertices() - 3;
    report.details["laman"] = laman_json(cert, g.num_vertices());
    return;
  }

  const int n = *opts.henneberg;
  if (n < 2) throw InputError("--henneberg needs n >= 2");
  if (opts.dimension < 2) throw InputError("--dimension must be >= 2");
  report.config["mode"] = "henneberg";
  report.config["n"] = n;
  report.config["dimension"] = opts.dimension;
  std::mt19937_64 rng(common.sim.seed);
  const Graph g = random_henneberg_graph(n, rng);
  const Eigen::VectorXd p = random_configuration(n, opts.dimension, Box{}, rng, &g);

  NetworkFile file;
  file.dimension = opts.dimension;
  for (int i = 0; i < n; ++i) {
    file.nodes.push_back({i + 1, Eigen::VectorXd(p.segment(i * opts.dimension, opts.dimension)), Role::agent,
                          std::nullopt});
  }
  for (const Edge& e : g.edges()) file.edges.emplace_back(e.first, e.second);
  const auto out = common.output_dir / "graph.json";
  write_network_file(file, out);
  report.outputs.push_back(out.string());

  const LamanCertificate cert = is_laman(g);
  report.verdicts["laman"] = cert.laman;
  report.metrics["num_nodes"] = n;
  report.metrics["num_edges"] = g.num_edges();
  report.metrics["laman_edge_count"] = 2 * n - 3;
  report.details["laman"] = laman_json(cert, n);
}

int execute(const std::string& subcommand, const CommonOptions& common,
            const std::function<void(RunReport&)>& body, std::ostream& out, std::ostream& err) {
  RunReport report;
  report.command = common.argv;
  report.subcommand = subcommand;
  report.config["output_dir"] = common.output_dir.string();
  report.config["format"] = common.format;
  report.config["dt"] = common.sim.dt;
  report.config["T"] = common.sim.horizon;
  report.config["method"] = to_string(common.sim.method);
  report.config["record_every"] = common.sim.record_every;
  report.config["seed"] = common.sim.seed;
  report.config["batch"] = common.batch;
  report.config["convergence_tolerance"] = common.sim.convergence_tolerance;
  report.config["collocation_tolerance"] = common.sim.collocation_tolerance;

  auto record_error = [&](const char* kind, const std::exception& e, int code) {
    report.error = {{"kind", kind}, {"message", e.what()}};
    report.exit_code = code;
  };
  try {
    if (common.format != "csv" && common.format != "json") throw InputError("--format must be csv or json");
    if (common.batch < 1) throw InputError("--batch must be >= 1");
    common.sim.validate();
    std::filesystem::create_directories(common.output_dir);
    body(report);
    report.exit_code = report.event_exit_code();
  } catch (const SingularGainError& e) {
    record_error("singular_gain", e, kExitInfeasible);
  } catch (const InfeasibleError& e) {
    record_error("infeasible", e, kExitInfeasible);
  } catch (const CollocationError& e) {
    record_error("collocation", e, kExitRuntimeEvent);
  } catch (const RuntimeEventError& e) {
    record_error("runtime_event", e, kExitRuntimeEvent);
  } catch (const InputError& e) {
    record_error("input", e, kExitInput);
  } catch (const std::filesystem::filesystem_error& e) {
    record_error("input", e, kExitInput);
  } catch (const std::exception& e) {
    record_error("internal", e, 1);
  }

  const auto path = common.output_dir / "report.json";
  report.outputs.push_back(path.string());
  const ordered_json doc = report.to_json();
  try {
    write_json(doc, path);
  } catch (const std::exception& e) {
    err << "warning: " << e.what() << '\n';
  }
  out << doc.dump(2) << '\n';
  if (!report.error.is_null()) err << "error: " << report.error["message"].get<std::string>() << '\n';
  for (const auto& ev : report.events) {
    if (ev["error"].get<bool>()) err << "event: " << ev["kind"].get<std::string>() << " at t = " << ev["time"] << ": "
                                     << ev["detail"].get<std::string>() << '\n';
  }
  return report.exit_code;
}

}  // namespace bearing::cli
