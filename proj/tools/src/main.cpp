#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bearing/cli/commands.hpp"
#include "bearing/errors.hpp"

namespace {

using namespace bearing::cli;

struct SimFlags {
  std::string method = "rk4";
  double convergence = 1e-9;
};

void add_common(CLI::App* cmd, CommonOptions& common, SimFlags& flags, bool simulates) {
  cmd->add_option("--output-dir", common.output_dir, "Directory for the report and output files")
      ->capture_default_str();
  cmd->add_option("--format", common.format, "Output table format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--seed", common.sim.seed, "PRNG seed")->capture_default_str();
  if (!simulates) return;
  cmd->add_option("--dt", common.sim.dt, "Integration step")->capture_default_str();
  cmd->add_option("--T", common.sim.horizon, "Integration horizon")->capture_default_str();
  cmd->add_option("--method", flags.method, "Integration method")
      ->check(CLI::IsMember({"euler", "rk4"}))
      ->capture_default_str();
  cmd->add_option("--record-every", common.sim.record_every, "Record every k-th step")->capture_default_str();
  cmd->add_option("--converge-tol", flags.convergence, "Stop once the field norm drops below this (0 disables)")
      ->capture_default_str();
  cmd->add_option("--batch", common.batch, "Number of independent seeded runs (seed, seed+1, ...)")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bearing rigidity, localization and formation control toolkit", "bearingkit"};
  app.require_subcommand(1);

  CommonOptions common;
  common.argv.assign(argv, argv + argc);
  SimFlags flags;

  AnalyzeOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Rigidity verdicts for a network file");
  analyze_cmd->add_option("file", analyze.input, "Network JSON file")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--mode", analyze.mode, "Rigidity notion")
      ->check(CLI::IsMember({"bearing", "distance", "se2", "generic"}))
      ->capture_default_str();
  analyze_cmd->add_option("--trials", analyze.trials, "Samples for generic mode")->capture_default_str();
  add_common(analyze_cmd, common, flags, false);

  LocalizeOptions localize;
  auto* localize_cmd = app.add_subcommand("localize", "Bearing-based network localization");
  localize_cmd->add_option("file", localize.input, "Network JSON file with anchors")
      ->required()
      ->check(CLI::ExistingFile);
  auto* solve_flag = localize_cmd->add_flag("--solve", localize.solve, "Closed-form least-squares solve");
  auto* sim_flag = localize_cmd->add_flag("--simulate", localize.simulate, "Integrate the gradient protocol");
  solve_flag->excludes(sim_flag);
  localize_cmd->add_option("--init", localize.init, "Initial follower estimate")
      ->check(CLI::IsMember({"random", "file"}))
      ->capture_default_str();
  add_common(localize_cmd, common, flags, true);

  FormationOptions formation;
  std::string gains_text = "1,1,1";
  auto* formation_cmd = app.add_subcommand("formation", "Simulate a formation control law");
  formation_cmd->add_option("file", formation.input, "Network JSON file with target_bearings")
      ->required()
      ->check(CLI::ExistingFile);
  formation_cmd
      ->add_option("--law", formation.law,
                   "si | si-pi | si-vel | di | di-acc | unicycle | bearing-only | bearing-gradient | "
                   "bearing-descent")
      ->required();
  formation_cmd->add_option("--gains", gains_text, "kp,ki,kv")->capture_default_str();
  formation_cmd->add_option("--leader-motion", formation.leader_motion, "none | const:v1,.. | sine:amp,freq,phase")
      ->capture_default_str();
  formation_cmd->add_option("--init", formation.init, "Initial positions")
      ->check(CLI::IsMember({"random", "file"}))
      ->capture_default_str();
  add_common(formation_cmd, common, flags, true);

  ConstructOptions construct;
  std::string laman_file;
  auto* construct_cmd = app.add_subcommand("construct", "Build or check Laman graphs");
  auto* henneberg_opt = construct_cmd->add_option("--henneberg", construct.henneberg,
                                                  "Random Henneberg sequence with n vertices");
  auto* laman_opt = construct_cmd->add_option("--laman-check", laman_file, "Check a graph file for Laman")
                        ->check(CLI::ExistingFile);
  henneberg_opt->excludes(laman_opt);
  construct_cmd->add_option("--dimension", construct.dimension, "Dimension of the emitted random positions")
      ->capture_default_str();
  add_common(construct_cmd, common, flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    common.sim.method = bearing::parse_method(flags.method);
  } catch (const bearing::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  common.sim.convergence_tolerance = flags.convergence;

  if (*analyze_cmd) {
    return execute("analyze", common, [&](RunReport& r) { run_analyze(analyze, common, r); }, std::cout, std::cerr);
  }
  if (*localize_cmd) {
    return execute("localize", common, [&](RunReport& r) { run_localize(localize, common, r); }, std::cout,
                   std::cerr);
  }
  if (*formation_cmd) {
    return execute("formation", common,
                   [&](RunReport& r) {
                     formation.gains = parse_gains(gains_text);
                     run_formation(formation, common, r);
                   },
                   std::cout, std::cerr);
  }
  if (!laman_file.empty()) construct.laman_check = laman_file;
  return execute("construct", common, [&](RunReport& r) { run_construct(construct, common, r); }, std::cout,
                 std::cerr);
}
