#include <benchmark/benchmark.h>

#include "nrcsim/dynamics.hpp"
#include "nrcsim/engine.hpp"
#include "nrcsim/experiment.hpp"
#include "nrcsim/routing.hpp"
#include "nrcsim/scenario.hpp"

namespace {

using namespace nrcsim;

ScenarioConfig grid_config(bool closure, double penetration) {
  ScenarioConfig c;
  c.network.rows = 3;
  c.network.cols = 4;
  c.demand.total_vehicles = 600;
  c.demand.penetration = penetration;
  if (closure) {
    ClosureSpec spec;
    spec.central_links = 1;
    c.closures.push_back(spec);
  }
  return c;
}

void BM_SmallGridRun(benchmark::State& state) {
  const auto scenario = build_scenario(grid_config(true, state.range(0) / 100.0));
  for (auto _ : state) {
    auto out = run(scenario);
    benchmark::DoNotOptimize(out.trips.data());
  }
}
BENCHMARK(BM_SmallGridRun)->Arg(0)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_EngineStep(benchmark::State& state) {
  const auto scenario = build_scenario(grid_config(true, 0.5));
  Simulation sim(scenario);
  for (int i = 0; i < 1500; ++i) sim.step();
  for (auto _ : state) {
    if (sim.done()) {
      state.PauseTiming();
      sim = Simulation(scenario);
      for (int i = 0; i < 1500; ++i) sim.step();
      state.ResumeTiming();
    }
    sim.step();
  }
}
BENCHMARK(BM_EngineStep);

void BM_ShortestPath(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const Network net = build_grid(n, n);
  const auto& edges = net.edges();
  std::size_t k = 0;
  for (auto _ : state) {
    const auto& a = edges[k % edges.size()];
    const auto& b = edges[(k * 7919 + 13) % edges.size()];
    benchmark::DoNotOptimize(shortest_path(net, a.id, b.id));
    ++k;
  }
}
BENCHMARK(BM_ShortestPath)->Arg(4)->Arg(10)->Arg(20);

void BM_KraussStep(benchmark::State& state) {
  KraussParams p;
  double v = 10.0;
  for (auto _ : state) {
    v = krauss_step(v, LeaderView::vehicle(9.0, 20.0), 13.89, 1.0, 0.5, p);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_KraussStep);

void BM_IdmStep(benchmark::State& state) {
  IdmParams p;
  double v = 10.0;
  for (auto _ : state) {
    v = idm_step(v, LeaderView::vehicle(9.0, 20.0), 13.89, 1.0, p);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_IdmStep);

}  // namespace

BENCHMARK_MAIN();
