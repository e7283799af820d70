#include <random>

#include <benchmark/benchmark.h>

#include "bearing/graph.hpp"
#include "bearing/linalg.hpp"
#include "bearing/rigidity.hpp"
#include "bearing/sim.hpp"

using namespace bearing;

namespace {

Network random_network(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Graph g = random_henneberg_graph(n, rng);
  return Network(g, d, random_configuration(n, d, Box{}, rng, &g));
}

void BM_BearingRigidityRank(benchmark::State& state) {
  const Network net = random_network(static_cast<int>(state.range(0)), 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(is_infinitesimally_bearing_rigid(net).rank);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BearingRigidityRank)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_BearingLaplacianRank(benchmark::State& state) {
  const Network net = random_network(static_cast<int>(state.range(0)), 3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(numeric_rank(bearing_laplacian(net)));
}
BENCHMARK(BM_BearingLaplacianRank)->RangeMultiplier(2)->Range(8, 64);

void BM_PebbleGame(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const Graph g = random_henneberg_graph(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(is_laman_pebble_game(g).laman);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PebbleGame)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

}  // namespace
