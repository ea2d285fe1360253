// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "cosplan/errors.hpp"
#include "cosplan/muco.hpp"
#include "cosplan/pedplan.hpp"
#include "cosplan/smoothing.hpp"
#include "cosplan/synthetic.hpp"
#include "cosplan/tastar.hpp"

namespace {

using namespace cosplan;

// One city, a handful of pedestrian paths; shared across all planner cases.
struct CityScene {
  BoxMap map;
  std::vector<PedTrajectory> paths;

  CityScene() : map(synthetic_city({})) {
    PedPlanConfig cfg;
    cfg.d_min = 30.0;
    cfg.d_max = 60.0;
    paths = plan_pedestrians_on_map(map, nullptr, 4, 7, cfg).paths;
  }

  static const CityScene& get() {
    static const CityScene scene;
    return scene;
  }
};

void BM_PedPlan(benchmark::State& state) {
  const BoxMap map = synthetic_city({});
  PedPlanConfig cfg;
  cfg.d_min = 30.0;
  cfg.d_max = 60.0;
  for (auto _ : state) benchmark::DoNotOptimize(plan_pedestrians_on_map(map, nullptr, 4, 7, cfg));
}
BENCHMARK(BM_PedPlan)->Unit(benchmark::kMillisecond);

void BM_Follower(benchmark::State& state) {
  const auto& s = CityScene::get();
  for (auto _ : state)
    for (const auto& p : s.paths) benchmark::DoNotOptimize(plan_follower(p, s.map, {}));
}
BENCHMARK(BM_Follower)->Unit(benchmark::kMillisecond);

void BM_TaStar(benchmark::State& state) {
  const auto& s = CityScene::get();
  for (auto _ : state)
    for (const auto& p : s.paths) benchmark::DoNotOptimize(plan_tastar(p, s.map, {}, {}));
}
BENCHMARK(BM_TaStar)->Unit(benchmark::kMillisecond);

void BM_TaStarSmooth(benchmark::State& state) {
  const auto& s = CityScene::get();
  for (auto _ : state)
    for (const auto& p : s.paths) benchmark::DoNotOptimize(plan_tastar_smooth(p, s.map, {}, {}, {}));
}
BENCHMARK(BM_TaStarSmooth)->Unit(benchmark::kMillisecond);

// MuCO gives up on some city starts (infeasible initialization); those are
// counted rather than aborting the run.
void BM_MuCo(benchmark::State& state) {
  const auto& s = CityScene::get();
  double failures = 0;
  for (auto _ : state) {
    for (const auto& p : s.paths) {
      try {
        benchmark::DoNotOptimize(plan_muco(p, s.map, {}, {}));
      } catch (const PlanningError&) {
        failures += 1;
      }
    }
  }
  state.counters["failures"] = benchmark::Counter(failures, benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_MuCo)->Unit(benchmark::kMillisecond);

}  // namespace
