#include <random>

#include <benchmark/benchmark.h>

#include "bearing/formation.hpp"
#include "bearing/localization.hpp"
#include "bearing/sim.hpp"

using namespace bearing;

namespace {

void BM_LocalizationRun(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  const Graph g = random_henneberg_graph(n, rng);
  const AnchoredNetwork an(Network(g, 3, random_configuration(n, 3, Box{}, rng, &g)), {0, 1, 2, 3});
  const Eigen::VectorXd init = random_configuration(n - 4, 3, Box{}, rng);
  SimConfig cfg;
  cfg.horizon = 1.0;
  cfg.convergence_tolerance = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_localization(an, init, cfg).final_max_error);
}
BENCHMARK(BM_LocalizationRun)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMillisecond);

void BM_BearingOnlyFormation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(5);
  const Graph g = random_henneberg_graph(n, rng);
  const TargetFormation tf = TargetFormation::from_configuration(g, 3, random_configuration(n, 3, Box{}, rng, &g));
  FormationInit init;
  init.positions = random_configuration(n, 3, Box{}, rng, &g);
  SimConfig cfg;
  cfg.horizon = 1.0;
  cfg.convergence_tolerance = 0.0;
  for (auto _ : state) {
    const FormationRun run = simulate_formation(tf, Law::bearing_only, init, Gains{}, LeaderMotion::stationary(3), cfg);
    benchmark::DoNotOptimize(run.trajectory.final_state().data());
  }
}
BENCHMARK(BM_BearingOnlyFormation)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMillisecond);

}  // namespace
