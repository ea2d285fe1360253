// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "cosplan/rng.hpp"
#include "cosplan/trajectory.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace cosplan {
namespace {

using testing::make_map;

TEST(Visibility, OpenSkyAndFullBlock) {
  const VisibilityConfig cfg;
  EXPECT_EQ(visibility_5ray(Vec3(-20, 0, 20), Vec3::Zero(), BoxMap{}, cfg), 1.0);
  const BoxMap slab = make_map({Aabb{Vec3(-12, -5, 8), Vec3(-8, 5, 12)}});
  EXPECT_EQ(visibility_5ray(Vec3(-20, 0, 20), Vec3::Zero(), slab, cfg), 0.0);
}

TEST(Visibility, PartialOcclusionCountsRays) {
  // A thin bar just above the head: the +0.8 m ray hits it, the rest pass
  // underneath, for a drone level with the target.
  const BoxMap bar = make_map({Aabb{Vec3(-5, -3, 0.7), Vec3(-4, 3, 0.9)}});
  EXPECT_DOUBLE_EQ(visibility_5ray(Vec3(-20, 0, 0.8), Vec3::Zero(), bar), 0.8);
}

TEST(Visibility, EndpointMarginIgnoresTargetStandingInBox) {
  // The target's feet touch a curb; hits in the last 0.2 m are ignored.
  const BoxMap curb = make_map({Aabb{Vec3(-0.1, -1, -0.2), Vec3(0.1, 1, 0.1)}});
  VisibilityConfig cfg;
  cfg.offsets = {Vec3::Zero()};
  EXPECT_EQ(visibility_5ray(Vec3(-20, 0, 20), Vec3::Zero(), curb, cfg), 1.0);
  cfg.endpoint_margin = 0.0;
  EXPECT_EQ(visibility_5ray(Vec3(-20, 0, 20), Vec3::Zero(), curb, cfg), 0.0);
}

TEST(Visibility, MatchesRaySampling) {
  SplitMix64 rng(8);
  const VisibilityConfig cfg;
  int partial = 0;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Aabb> boxes;
    for (int i = 0; i < 5; ++i) {
      const Vec3 lo(rng.uniform(-25, 5), rng.uniform(-8, 8), rng.uniform(0, 18));
      boxes.push_back({lo, lo + Vec3(rng.uniform(0.5, 4), rng.uniform(0.5, 4), rng.uniform(0.5, 4))});
    }
    const BoxMap map = make_map(boxes);
    for (int q = 0; q < 20; ++q) {
      const Vec3 drone(rng.uniform(-30, -15), rng.uniform(-10, 10), rng.uniform(18, 26));
      const Vec3 target(rng.uniform(-2, 2), rng.uniform(-2, 2), 0.0);
      const double got = visibility_5ray(drone, target, map, cfg);
      const double want = testing::sampled_visibility(drone, target, map, cfg);
      // Sampling can only miss grazing hits, which would make it see more.
      EXPECT_LE(got, want + 1e-12);
      EXPECT_NEAR(got, want, 0.2 + 1e-12);
      partial += got > 0.0 && got < 1.0;
    }
  }
  EXPECT_GT(partial, 0);
}

TEST(Visibility, AnnotateFillsEveryFrame) {
  const PedTrajectory ped = testing::straight_walk(Vec3::Zero(), Vec2(1, 0), 10);
  DroneTrajectory t = plan_follower(ped, BoxMap{}, SharedPlannerConfig{});
  ASSERT_EQ(t.visibility.size(), 10u);
  for (double v : t.visibility) EXPECT_EQ(v, 1.0);
}

}  // namespace
}  // namespace cosplan
