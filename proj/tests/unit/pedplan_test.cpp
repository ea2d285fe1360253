// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/pedplan.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "cosplan/errors.hpp"
#include "cosplan/rng.hpp"
#include "cosplan/synthetic.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace cosplan {
namespace {

using testing::dijkstra_cost;
using testing::random_grid;

TEST(AStar2d, CostEqualsDijkstra) {
  SplitMix64 pick(99);
  int reachable = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const OccupancyGrid g = random_grid(seed, 24, 24, 0.25);
    std::vector<Cell> free;
    for (int y = 0; y < 24; ++y)
      for (int x = 0; x < 24; ++x)
        if (g.is_free({x, y})) free.push_back({x, y});
    const Cell a = free[pick.below(free.size())], b = free[pick.below(free.size())];
    const auto want = dijkstra_cost(g, a, b);
    if (!want) {
      EXPECT_THROW(plan_astar_2d(g, a, b), PlanningError);
      continue;
    }
    ++reachable;
    const GridPath path = plan_astar_2d(g, a, b);
    EXPECT_NEAR(path.cost, *want, 1e-9) << "seed " << seed;
    ASSERT_EQ(path.cells.front(), a);
    ASSERT_EQ(path.cells.back(), b);
    // The returned cells realise the reported cost with legal moves.
    double sum = 0.0;
    for (std::size_t i = 1; i < path.cells.size(); ++i) {
      const int dx = path.cells[i].x - path.cells[i - 1].x, dy = path.cells[i].y - path.cells[i - 1].y;
      ASSERT_LE(std::max(std::abs(dx), std::abs(dy)), 1);
      ASSERT_TRUE(g.is_free(path.cells[i]));
      if (dx && dy) {
        ASSERT_TRUE(g.is_free({path.cells[i - 1].x + dx, path.cells[i - 1].y}));
        ASSERT_TRUE(g.is_free({path.cells[i - 1].x, path.cells[i - 1].y + dy}));
      }
      sum += (dx && dy) ? std::sqrt(2.0) : 1.0;
    }
    EXPECT_NEAR(sum, path.cost, 1e-9);
  }
  EXPECT_GT(reachable, 20);
}

TEST(AStar2d, NoCornerCutting) {
  OccupancyGrid g = random_grid(0, 3, 3, 0.0);
  // Block (1, 0) and (0, 1): the diagonal (0, 0) -> (1, 1) is illegal and the
  // corner cell has no other exit.
  g.inflated_occupied[g.spec.index({1, 0})] = 1;
  g.inflated_occupied[g.spec.index({0, 1})] = 1;
  g.component_sizes = label_components(g.spec, g.inflated_occupied, g.component_labels);
  EXPECT_THROW(plan_astar_2d(g, {0, 0}, {2, 2}), PlanningError);
}

TEST(Curvature, MengerOnCircleIsInverseRadius) {
  for (double r : {0.5, 2.0, 17.0}) {
    for (double a : {0.1, 0.7, 1.9}) {
      const Vec3 p0(r, 0, 0), p1(r * std::cos(a), r * std::sin(a), 0), p2(r * std::cos(2 * a), r * std::sin(2 * a), 0);
      EXPECT_NEAR(menger_curvature(p0, p1, p2), 1.0 / r, 1e-9);
    }
  }
  EXPECT_EQ(menger_curvature(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)), 0.0);
  EXPECT_EQ(menger_curvature(Vec3(0, 0, 0), Vec3(0, 0, 0), Vec3(1, 0, 0)), 0.0);
}

TEST(Curvature, SpeedModel) {
  SpeedModel m;
  EXPECT_DOUBLE_EQ(curvature_speed(0.0, 0.0, m), 1.2);
  EXPECT_DOUBLE_EQ(curvature_speed(1.0, 0.0, m), 0.2);
  EXPECT_DOUBLE_EQ(curvature_speed(0.0, 1.0, m), 1.2 * 1.15);
  m.v_max = 1.0;
  EXPECT_DOUBLE_EQ(curvature_speed(0.0, 1.0, m), 1.0);
}

TEST(Resample, SampleCountAndSpacing) {
  GridSpec s;
  s.resolution = 1.0;
  s.width = s.height = 50;
  std::vector<Cell> straight;
  for (int x = 0; x < 40; ++x) straight.push_back({x, 5});
  SpeedModel m;
  m.beta = 0.0;
  const PedTrajectory t = resample_variable_speed(straight, s, m, 0.5, 1);
  // 39 m at 1.2 m/s -> T = 32.5 s -> 66 samples.
  ASSERT_EQ(t.size(), 66u);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    EXPECT_DOUBLE_EQ(t.waypoints[k].t, 0.5 * k);
    EXPECT_NEAR((t.position(k + 1) - t.position(k)).norm(), 0.6, 1e-9);
  }
  EXPECT_TRUE(t.position(t.size() - 1).isApprox(Vec3(39.5, 5.5, 0.0)));
}

TEST(Resample, SlowsInTurns) {
  GridSpec s;
  s.resolution = 1.0;
  s.width = s.height = 20;
  std::vector<Cell> zigzag;
  for (int i = 0; i < 12; ++i) zigzag.push_back({i, i % 2});
  std::vector<Cell> line;
  for (int i = 0; i < 12; ++i) line.push_back({i, 0});
  SpeedModel m;
  m.beta = 0.0;
  const auto fast = resample_variable_speed(line, s, m, 0.5, 0);
  const auto slow = resample_variable_speed(zigzag, s, m, 0.5, 0);
  EXPECT_GT(slow.size(), fast.size());
  for (const auto& w : slow.waypoints) EXPECT_LE(w.v, m.v_max + 1e-12);
}

TEST(Endpoints, RespectDistanceBandAndComponent) {
  const OccupancyGrid g = random_grid(4, 60, 60, 0.1);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto [a, b] = sample_endpoints(g, 10.0, 20.0, seed);
    const double d = (g.spec.cell_center(a) - g.spec.cell_center(b)).norm();
    EXPECT_GE(d, 10.0);
    EXPECT_LE(d, 20.0);
    EXPECT_EQ(g.label(a), g.label(b));
    EXPECT_EQ(sample_endpoints(g, 10.0, 20.0, seed), std::make_pair(a, b));
  }
  EXPECT_THROW(sample_endpoints(g, 500.0, 600.0, 0), SamplingError);
  EXPECT_THROW(sample_endpoints(g, 5.0, 1.0, 0), ConfigError);
}

TEST(PedPlan, CityRunIsDeterministicAndFillsReport) {
  const BoxMap city = synthetic_city({});
  PedPlanConfig cfg;
  cfg.d_min = 30.0;
  cfg.d_max = 60.0;
  const PedPlanRun a = plan_pedestrians_on_map(city, nullptr, 6, 42, cfg);
  const PedPlanRun b = plan_pedestrians_on_map(city, nullptr, 6, 42, cfg);
  EXPECT_EQ(paths_to_json(a.paths, a.grid.spec), paths_to_json(b.paths, b.grid.spec));
  EXPECT_EQ(a.report.paths_planned + a.report.sampling_failures, 6u);
  EXPECT_GT(a.report.grid_width, 0);
  EXPECT_GT(a.report.raw_cells, 0u);
  EXPECT_GE(a.report.inflated_cells, a.report.raw_cells);
  for (const auto& p : a.paths) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      EXPECT_DOUBLE_EQ(p.waypoints[k].t, k * cfg.dt);
      if (k) { EXPECT_LE((p.position(k) - p.position(k - 1)).norm(), cfg.speed.v_max * cfg.dt + 1e-9); }
    }
    // Walkers stay out of every box at body height.
    for (const auto& w : p.waypoints) EXPECT_GT(city.signed_clearance(Vec3(w.p.x(), w.p.y(), 1.0)), 0.0);
  }
}

TEST(PedPlan, JsonRoundTrip) {
  const BoxMap city = synthetic_city({});
  PedPlanConfig cfg;
  cfg.d_min = 20.0;
  cfg.d_max = 40.0;
  const PedPlanRun run = plan_pedestrians_on_map(city, nullptr, 2, 1, cfg);
  ASSERT_FALSE(run.paths.empty());
  const auto doc = ped_trajectory_to_json(run.paths[0], run.grid.spec);
  EXPECT_EQ(ped_trajectory_to_json(ped_trajectory_from_json(doc), run.grid.spec), doc);
  const auto cdoc = pedplan_config_to_json(cfg);
  EXPECT_EQ(pedplan_config_to_json(pedplan_config_from_json(cdoc)), cdoc);
}

}  // namespace
}  // namespace cosplan
