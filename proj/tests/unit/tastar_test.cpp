// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/tastar.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <limits>
#include <nlohmann/json.hpp>

#include "cosplan/errors.hpp"
#include "fixtures.hpp"

namespace cosplan {
namespace {

using testing::make_map;
using testing::straight_walk;

TEST(TaStarCost, TermsFollowTheirDefinitions) {
  SharedPlannerConfig shared;
  TaStarConfig cfg;
  const Vec3 target(0, 0, 0);
  const Vec3 p(-20, 0, 20), prev(-24, 0, 20), prev2(-28, 0, 24);
  const TaStarStage s = tastar_stage_cost(p, &prev, &prev2, target, 0.6, 5.0, shared, cfg);
  EXPECT_DOUBLE_EQ(s.tracking, 0.0);
  EXPECT_DOUBLE_EQ(s.visibility, cfg.w_visibility * 0.16);
  EXPECT_DOUBLE_EQ(s.altitude, 0.0);
  EXPECT_DOUBLE_EQ(s.safety, cfg.w_safety * 0.5 * 9.0);
  EXPECT_DOUBLE_EQ(s.path, 4.0 * cfg.w_path);
  EXPECT_DOUBLE_EQ(s.smooth, cfg.w_smooth * 16.0);
  const TaStarStage far = tastar_stage_cost(Vec3(-30, 0, 24), nullptr, nullptr, target, 1.0, 50.0, shared, cfg);
  EXPECT_DOUBLE_EQ(far.tracking, cfg.w_tracking * 100.0);
  EXPECT_DOUBLE_EQ(far.altitude, cfg.w_altitude * 16.0);
  EXPECT_DOUBLE_EQ(far.path + far.smooth + far.safety + far.visibility, 0.0);
}

// Enumerates every lattice path from the planner's start voxel and returns
// the cheapest total. Feasibility mirrors the planner's constraints.
double exhaustive_best(const PedTrajectory& ped, const BoxMap& map, const SharedPlannerConfig& shared,
                       const TaStarConfig& cfg, const Vec3& start) {
  std::vector<Vec3> moves;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const Vec3 m = Vec3(dx, dy, dz) * cfg.voxel;
        if (m.norm() <= shared.max_step() + 1e-9) moves.push_back(m);
      }
  auto feasible = [&](const Vec3& p, std::size_t i) {
    return p.z() >= shared.z_min - 1e-9 && p.z() <= shared.z_max + 1e-9 &&
           (p - ped.position(i)).head<2>().norm() <= cfg.corridor_margin &&
           map.signed_clearance(p) >= shared.safety_distance;
  };
  auto stage = [&](const Vec3& p, const Vec3* a, const Vec3* b, std::size_t i) {
    const double vis = visibility_5ray(p, ped.position(i), map, cfg.visibility);
    return tastar_stage_cost(p, a, b, ped.position(i), vis, map.signed_clearance(p), shared, cfg).total();
  };
  double best = std::numeric_limits<double>::infinity();
  std::vector<Vec3> path{start};
  std::function<void(double)> rec = [&](double g) {
    const std::size_t i = path.size();
    if (i == ped.size()) {
      best = std::min(best, g);
      return;
    }
    for (const Vec3& m : moves) {
      const Vec3 p = path.back() + m;
      if (!feasible(p, i)) continue;
      const Vec3* prev2 = i >= 2 ? &path[i - 2] : nullptr;
      const double c = stage(p, &path.back(), prev2, i);
      path.push_back(p);
      rec(g + c);
      path.pop_back();
    }
  };
  rec(stage(start, nullptr, nullptr, 0));
  return best;
}

TEST(TaStar, MatchesExhaustiveSearchOnShortHorizons) {
  SharedPlannerConfig shared;
  TaStarConfig cfg;
  cfg.w_smooth = 0.0;  // the lattice DP is then exact
  cfg.beam_width = 1 << 20;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto sc = testing::wall_fixture(seed);
    // Four frames right where the wall starts to bite.
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < 4; ++i) pts.push_back(sc.ped.position(18 + 2 * i));
    const PedTrajectory ped = make_ped_trajectory(pts, 0.5);
    const DroneTrajectory t = plan_tastar(ped, sc.map, shared, cfg);
    const double want = exhaustive_best(ped, sc.map, shared, cfg, t.waypoints[0].p);
    EXPECT_NEAR(t.diagnostics["total_cost"].get<double>(), want, 1e-9 * std::max(1.0, want)) << sc.name;
  }
}

TEST(TaStar, WiderSmoothingTermNeverBeatsExhaustive) {
  SharedPlannerConfig shared;
  TaStarConfig cfg;
  cfg.beam_width = 1 << 20;
  const auto sc = testing::wall_fixture(3);
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < 4; ++i) pts.push_back(sc.ped.position(20 + i));
  const PedTrajectory ped = make_ped_trajectory(pts, 0.5);
  const DroneTrajectory t = plan_tastar(ped, sc.map, shared, cfg);
  EXPECT_GE(t.diagnostics["total_cost"].get<double>() + 1e-9, exhaustive_best(ped, sc.map, shared, cfg, t.waypoints[0].p));
}

TEST(TaStar, ReportedCostEqualsRecomputedPathCost) {
  SharedPlannerConfig shared;
  TaStarConfig cfg;
  const auto sc = testing::random_scenario(5);
  const DroneTrajectory t = plan_tastar(sc.ped, sc.map, shared, cfg);
  double sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Vec3& p = t.waypoints[i].p;
    const Vec3* a = i ? &t.waypoints[i - 1].p : nullptr;
    const Vec3* b = i >= 2 ? &t.waypoints[i - 2].p : nullptr;
    sum += tastar_stage_cost(p, a, b, sc.ped.position(i), t.visibility[i], sc.map.signed_clearance(p), shared, cfg)
               .total();
  }
  EXPECT_NEAR(t.diagnostics["total_cost"].get<double>(), sum, 1e-6 * sum);
}

TEST(TaStar, OutputRespectsInterface) {
  SharedPlannerConfig shared;
  const auto sc = testing::random_scenario(9);
  const DroneTrajectory t = plan_tastar(sc.ped, sc.map, shared, TaStarConfig{});
  ASSERT_EQ(t.size(), sc.ped.size());
  EXPECT_EQ(t.planner, "tastar");
  EXPECT_EQ(t.visibility.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_DOUBLE_EQ(t.waypoints[i].t, sc.ped.waypoints[i].t);
    EXPECT_GE(sc.map.signed_clearance(t.waypoints[i].p), shared.safety_distance);
    EXPECT_GE(t.waypoints[i].p.z(), shared.z_min);
    if (i) { EXPECT_LE((t.waypoints[i].p - t.waypoints[i - 1].p).norm(), shared.max_step() + 1e-9); }
  }
}

TEST(TaStar, DeterministicAcrossRuns) {
  const auto sc = testing::wall_fixture(1);
  const auto a = plan_tastar(sc.ped, sc.map, {}, {});
  const auto b = plan_tastar(sc.ped, sc.map, {}, {});
  EXPECT_EQ(a.positions(), b.positions());
}

TEST(TaStar, NarrowBeamStillPlans) {
  TaStarConfig cfg;
  cfg.beam_width = 4;
  const auto sc = testing::wall_fixture(2);
  const auto t = plan_tastar(sc.ped, sc.map, {}, cfg);
  EXPECT_GT(t.diagnostics["nodes_pruned_by_beam"].get<std::size_t>(), 0u);
}

TEST(TaStar, FailsWhenNoStartVoxelIsFeasible) {
  const PedTrajectory ped = straight_walk(Vec3::Zero(), Vec2(1, 0), 5);
  const BoxMap dome = make_map({Aabb{Vec3(-200, -200, 0), Vec3(200, 200, 120)}});
  EXPECT_THROW(plan_tastar(ped, dome, {}, {}), PlanningError);
}

TEST(TaStar, ConfigValidationAndJson) {
  TaStarConfig bad;
  bad.voxel = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  TaStarConfig cfg;
  cfg.beam_width = 77;
  cfg.visibility.offsets = {Vec3(0, 0, 1)};
  const auto doc = tastar_config_to_json(cfg);
  EXPECT_EQ(tastar_config_to_json(tastar_config_from_json(doc)), doc);
}

}  // namespace
}  // namespace cosplan
