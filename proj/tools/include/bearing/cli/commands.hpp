#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bearing/cli/report.hpp"
#include "bearing/formation.hpp"
#include "bearing/rigidity.hpp"
#include "bearing/sim.hpp"

namespace bearing::cli {

struct CommonOptions {
  std::filesystem::path output_dir = ".";
  std::string format = "csv";  // trajectory and table format: csv | json
  SimConfig sim;
  int batch = 1;
  std::vector<std::string> argv;
};

struct AnalyzeOptions {
  std::filesystem::path input;
  std::string mode = "bearing";  // bearing | distance | se2 | generic
  int trials = kDefaultGenericTrials;
};

struct LocalizeOptions {
  std::filesystem::path input;
  bool solve = false;
  bool simulate = false;
  std::string init = "random";  // random | file
};

struct FormationOptions {
  std::filesystem::path input;
  std::string law = "si";
  Gains gains;
  std::string leader_motion = "none";
  std::string init = "file";  // file | random
};

struct ConstructOptions {
  std::optional<int> henneberg;
  std::optional<std::filesystem::path> laman_check;
  int dimension = 2;
};

// "kp,ki,kv"; throws InputError.
Gains parse_gains(const std::string& text);
// "none" | "const:v1,..,vd" | "sine:amp,freq,phase" (three scalars for every
// axis, or d values each). Throws InputError.
LeaderMotion parse_leader_motion(const std::string& text, int d);

void run_analyze(const AnalyzeOptions& opts, const CommonOptions& common, RunReport& report);
void run_localize(const LocalizeOptions& opts, const CommonOptions& common, RunReport& report);
void run_formation(const FormationOptions& opts, const CommonOptions& common, RunReport& report);
void run_construct(const ConstructOptions& opts, const CommonOptions& common, RunReport& report);

// Runs `body` against a fresh report, maps exceptions and error events onto
// exit codes, writes <output_dir>/report.json and prints the report to `out`.
// Diagnostics for failed runs go to `err`. Returns the exit code.
int execute(const std::string& subcommand, const CommonOptions& common,
            const std::function<void(RunReport&)>& body, std::ostream& out, std::ostream& err);

}  // namespace bearing::cli
