// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/baselines.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "cosplan/errors.hpp"
#include "cosplan/evalkit.hpp"
#include "cosplan/rng.hpp"
#include "fixtures.hpp"

namespace cosplan {
namespace {

// Point at arc length s, walking segments one by one.
Vec3 point_at(const std::vector<Vec3>& path, double s) {
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double len = (path[i] - path[i - 1]).norm();
    if (s <= len) return path[i - 1] + (len > 0 ? s / len : 0.0) * (path[i] - path[i - 1]);
    s -= len;
  }
  return path.back();
}

TEST(ResampleArcLength, MatchesSegmentWalk) {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec3> path;
    const int m = 2 + static_cast<int>(rng.below(8));
    for (int i = 0; i < m; ++i) path.emplace_back(rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(20, 40));
    double total = 0.0;
    for (int i = 1; i < m; ++i) total += (path[i] - path[i - 1]).norm();
    const std::size_t n = 2 + rng.below(60);
    const double max_step = rng.uniform(0.5, 6.0);
    const auto out = resample_arc_length(path, n, max_step);
    ASSERT_EQ(out.size(), n);
    const double spacing = std::min(max_step, total / (n - 1));
    for (std::size_t i = 0; i < n; ++i)
      EXPECT_LE((out[i] - point_at(path, std::min(total, i * spacing))).norm(), 1e-9) << trial << ":" << i;
  }
}

TEST(ResampleArcLength, DegenerateInputs) {
  EXPECT_THROW(resample_arc_length({}, 3, 1.0), ValidationError);
  const auto one = resample_arc_length({Vec3(1, 2, 3)}, 4, 1.0);
  for (const auto& p : one) EXPECT_EQ(p, Vec3(1, 2, 3));
  const auto dup = resample_arc_length({Vec3(0, 0, 0), Vec3(0, 0, 0), Vec3(2, 0, 0)}, 3, 5.0);
  EXPECT_TRUE(dup[1].isApprox(Vec3(1, 0, 0)));
}

TEST(Baselines, NamesRoundTrip) {
  EXPECT_EQ(all_baseline_kinds().size(), 12u);
  for (BaselineKind k : all_baseline_kinds()) EXPECT_EQ(parse_baseline_kind(baseline_name(k)), k);
  EXPECT_THROW(parse_baseline_kind("dstar_lite"), ConfigError);
}

TEST(Baselines, EveryKindPlansInOpenSpace) {
  SharedPlannerConfig shared;
  const PedTrajectory ped = testing::straight_walk(Vec3::Zero(), Vec2(1, 0.3).normalized(), 30);
  for (BaselineKind k : all_baseline_kinds()) {
    const DroneTrajectory t = plan_baseline(k, ped, BoxMap{}, shared, {});
    SCOPED_TRACE(std::string(baseline_name(k)));
    ASSERT_FALSE(t.failed) << t.failure;
    ASSERT_EQ(t.size(), ped.size());
    EXPECT_EQ(t.planner, "baseline:" + std::string(baseline_name(k)));
    EXPECT_EQ(t.visibility.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_DOUBLE_EQ(t.waypoints[i].t, ped.waypoints[i].t);
      EXPECT_GE(t.waypoints[i].p.z(), shared.z_min - 1e-9);
      EXPECT_LE(t.waypoints[i].p.z(), shared.z_max + 1e-9);
      if (i) { EXPECT_LE((t.waypoints[i].p - t.waypoints[i - 1].p).norm(), shared.max_step() + 1e-9); }
    }
    EXPECT_TRUE(t.diagnostics["repair"]["residual_frames"].empty());
  }
}

TEST(Baselines, SamplingKindsAreSeeded) {
  const auto sc = testing::clutter_scenario(4);
  BaselineConfig cfg;
  cfg.rng_seed = 17;
  for (BaselineKind k : {BaselineKind::kRrtStar, BaselineKind::kPrm, BaselineKind::kBsplinePrm}) {
    const auto a = plan_baseline(k, sc.ped, sc.map, {}, cfg);
    const auto b = plan_baseline(k, sc.ped, sc.map, {}, cfg);
    EXPECT_EQ(a.positions(), b.positions()) << baseline_name(k);
  }
}

TEST(Baselines, RepairClearsClutterCollisions) {
  SharedPlannerConfig shared;
  BaselineConfig raw_cfg;
  raw_cfg.repair_enabled = false;
  int raw_colliding = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto sc = testing::clutter_scenario(seed);
    for (BaselineKind k : all_baseline_kinds()) {
      const auto raw = plan_baseline(k, sc.ped, sc.map, shared, raw_cfg);
      if (raw.failed) continue;
      raw_colliding += trajectory_metrics(raw, sc.ped, sc.map).collision_fraction > 0.0;
      const auto fixed = repair_collisions(raw, sc.map, shared);
      const auto m = trajectory_metrics(fixed, sc.ped, sc.map);
      if (fixed.diagnostics["repair"]["residual_frames"].empty()) {
        EXPECT_EQ(m.collision_fraction, 0.0) << baseline_name(k);
      }
      // Repair only ever touches colliding waypoints.
      for (std::size_t i = 0; i < raw.size(); ++i)
        if (sc.map.signed_clearance(raw.waypoints[i].p) >= 0.0) { EXPECT_EQ(fixed.waypoints[i].p, raw.waypoints[i].p); }
    }
  }
  EXPECT_GT(raw_colliding, 0) << "the clutter fixture should make some baselines collide";
}

TEST(Repair, CageIsFlaggedResidual) {
  const Vec3 c(0, 0, 40);
  const BoxMap cage = testing::cage_map(c);
  const PedTrajectory ped = testing::stationary_target(Vec3::Zero(), 3);
  std::vector<Vec3> pts{Vec3(-60, 0, 40), c, Vec3(-60, 0, 40)};
  const DroneTrajectory t = make_drone_trajectory(ped, pts, "probe");
  const DroneTrajectory r = repair_collisions(t, cage, {});
  EXPECT_EQ(r.diagnostics["repair"]["residual_frames"], nlohmann::json::array({1}));
  EXPECT_NEAR(r.diagnostics["repair"]["residual_collision_fraction"].get<double>(), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(r.waypoints[1].p, c);
  EXPECT_EQ(r.diagnostics["repair"]["moved_waypoints"], 0);
}

TEST(Repair, SingleBoxPushesToMargin) {
  const BoxMap box = testing::make_map({Aabb{Vec3(-5, -5, 0), Vec3(5, 5, 30)}});
  const PedTrajectory ped = testing::stationary_target(Vec3(20, 0, 0), 1);
  const DroneTrajectory t = make_drone_trajectory(ped, {Vec3(4, 0, 22)}, "probe");
  const DroneTrajectory r = repair_collisions(t, box, {}, {0.05, 10});
  EXPECT_NEAR(box.signed_clearance(r.waypoints[0].p), 0.05, 1e-6);
  EXPECT_NEAR(r.waypoints[0].p.x(), 5.05, 1e-6);
}

TEST(Baselines, ConfigJsonAndValidation) {
  BaselineConfig cfg;
  cfg.prm_k = 7;
  const auto doc = baseline_config_to_json(cfg);
  EXPECT_EQ(baseline_config_to_json(baseline_config_from_json(doc)), doc);
  cfg.voxel = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace cosplan
