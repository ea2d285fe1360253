// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/smoothing.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <numeric>

#include "cosplan/errors.hpp"
#include "fixtures.hpp"

namespace cosplan {
namespace {

using testing::make_map;

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

void expect_contract(const DroneTrajectory& raw, const DroneTrajectory& out, const PedTrajectory& ped,
                     const BoxMap& map, const SharedPlannerConfig& shared) {
  std::vector<double> raw_vis(raw.size()), out_vis(out.size());
  double min_clear = 1e300;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw_vis[i] = visibility_5ray(raw.waypoints[i].p, ped.position(i), map);
    out_vis[i] = visibility_5ray(out.waypoints[i].p, ped.position(i), map);
    min_clear = std::min(min_clear, map.signed_clearance(out.waypoints[i].p));
  }
  const bool ok = mean_of(raw_vis) - mean_of(out_vis) <= 0.05 + 1e-12 && min_clear >= shared.safety_distance;
  if (!ok) { EXPECT_EQ(out.positions(), raw.positions()); }
  EXPECT_EQ(out.diagnostics["smoothing"]["fell_back_to_raw"].get<bool>(), out.positions() == raw.positions() && !ok);
}

TEST(Smoothing, ContractHoldsOnRandomScenes) {
  SharedPlannerConfig shared;
  int changed = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto sc = testing::random_scenario(seed);
    const DroneTrajectory raw = plan_tastar(sc.ped, sc.map, shared, {});
    const DroneTrajectory out = smooth_trajectory(raw, sc.ped, sc.map, shared, {});
    EXPECT_EQ(out.planner, "tastar_smooth");
    expect_contract(raw, out, sc.ped, sc.map, shared);
    changed += out.positions() != raw.positions();
  }
  EXPECT_GT(changed, 0) << "smoothing never changed anything";
}

TEST(Smoothing, ReducesSecondDifferences) {
  const auto sc = testing::random_scenario(2);
  const DroneTrajectory raw = plan_tastar(sc.ped, sc.map, {}, {});
  const DroneTrajectory out = smooth_trajectory(raw, sc.ped, sc.map, {}, {});
  auto roughness = [](const std::vector<Vec3>& p) {
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) s += (p[i + 1] - 2.0 * p[i] + p[i - 1]).squaredNorm();
    return s;
  };
  EXPECT_LT(roughness(out.positions()), roughness(raw.positions()));
}

TEST(Smoothing, AdversarialRawFallsBackUnchanged) {
  // A hand-made raw trajectory that grazes a pillar at 1 m. No smoothing
  // move may touch that waypoint (candidates need 3 m), so the final
  // clearance check fails and the raw trajectory must come back verbatim.
  SharedPlannerConfig shared;
  const PedTrajectory ped = testing::straight_walk(Vec3::Zero(), Vec2(1, 0), 30);
  const BoxMap pillar = make_map({Aabb{Vec3(-11, 1, 0), Vec3(-9, 3, 40)}});
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < ped.size(); ++i) {
    const double zig = (i % 2) ? 1.5 : -1.5;
    pts.emplace_back(ped.position(i).x() - 20.0, zig, 20.0);
  }
  pts[15] = Vec3(-10.0, 0.0, 20.0);  // 1 m below the pillar's south face
  DroneTrajectory raw = make_drone_trajectory(ped, pts, "tastar");
  ASSERT_LT(pillar.signed_clearance(pts[15]), shared.safety_distance);
  const DroneTrajectory out = smooth_trajectory(raw, ped, pillar, shared, {});
  EXPECT_TRUE(out.diagnostics["smoothing"]["fell_back_to_raw"].get<bool>());
  EXPECT_EQ(out.positions(), raw.positions());
  EXPECT_GT(out.diagnostics["smoothing"]["elastic_updates"].get<int>() +
                out.diagnostics["smoothing"]["accepted_shortcuts"].get<int>(),
            0)
      << "the fixture should tempt the smoother";
}

TEST(Smoothing, AnchorsKeepFullVisibility) {
  SharedPlannerConfig shared;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto sc = testing::wall_fixture(seed);
    const DroneTrajectory raw = plan_tastar(sc.ped, sc.map, shared, {});
    const DroneTrajectory out = smooth_trajectory(raw, sc.ped, sc.map, shared, {});
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw.visibility[i] >= 0.999) { EXPECT_GE(out.visibility[i], raw.visibility[i] - 1e-12); }
      EXPECT_GE(out.visibility[i], raw.visibility[i] - 0.10 - 1e-12);
    }
  }
}

TEST(Smoothing, ConfigJson) {
  SmoothConfig cfg;
  cfg.shortcut_span = 5;
  const auto doc = smooth_config_to_json(cfg);
  EXPECT_EQ(smooth_config_to_json(smooth_config_from_json(doc)), doc);
  cfg.mean_vis_drop = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace cosplan
