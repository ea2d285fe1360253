// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/augment.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <fstream>
#include <set>

#include "cosplan/errors.hpp"
#include "fixtures.hpp"

namespace cosplan {
namespace {

TEST(Camera, FocalFromFov) {
  EXPECT_NEAR(fov_to_focal(90, 1280), 640.0, 1e-9);
  EXPECT_NEAR(fov_to_focal(60, 1280), 1108.51, 0.01);
  EXPECT_NEAR(fov_to_focal(110, 1280), 448.1, 0.05);
  EXPECT_NEAR(fov_to_focal(30, 1280), 2388.5, 0.05);
  for (double fov : {10.0, 45.0, 120.0, 170.0}) EXPECT_NEAR(focal_to_fov(fov_to_focal(fov, 800), 800), fov, 1e-9);
  EXPECT_THROW(fov_to_focal(180, 1280), ConfigError);
  EXPECT_THROW(fov_to_focal(0, 1280), ConfigError);
  EXPECT_THROW(fov_to_focal(90, 0), ConfigError);
}

TEST(Camera, IntrinsicsMatrix) {
  const CameraIntrinsics cam;
  const Eigen::Matrix3d k = cam.K();
  EXPECT_DOUBLE_EQ(k(0, 0), 640.0);
  EXPECT_DOUBLE_EQ(k(1, 1), 640.0);
  EXPECT_DOUBLE_EQ(k(0, 2), 640.0);
  EXPECT_DOUBLE_EQ(k(1, 2), 360.0);
  EXPECT_EQ(cam.to_json()["K"][2], nlohmann::json({0.0, 0.0, 1.0}));
}

TEST(Camera, LookAtCentersTarget) {
  const CameraIntrinsics cam;
  SplitMix64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec3 eye(rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(20, 60));
    const Vec3 target(rng.uniform(-5, 5), rng.uniform(-5, 5), 0);
    const auto px = project_point(cam, look_at(eye, target), target);
    ASSERT_TRUE(px);
    EXPECT_NEAR(px->x(), 640.0, 1e-6);
    EXPECT_NEAR(px->y(), 360.0, 1e-6);
    EXPECT_TRUE(target_in_frustum(cam, look_at(eye, target), target));
  }
}

TEST(Camera, PinholeOffsetsAndBehind) {
  // Level camera looking down +x: a point 1 m to the left (+y) at 10 m
  // depth lands f/10 pixels left of center, one 1 m up lands above it.
  const CameraIntrinsics cam;
  CameraPose pose;
  const auto left = project_point(cam, pose, Vec3(10, 1, 0));
  const auto up = project_point(cam, pose, Vec3(10, 0, 1));
  EXPECT_NEAR(left->x(), 640.0 - 64.0, 1e-9);
  EXPECT_NEAR(up->y(), 360.0 - 64.0, 1e-9);
  EXPECT_FALSE(project_point(cam, pose, Vec3(-1, 0, 0)));
  EXPECT_FALSE(target_in_frustum(cam, pose, Vec3(1, 5, 0)));
  pose.roll_deg = 90.0;
  const auto rolled = project_point(cam, pose, Vec3(10, 1, 0));
  EXPECT_NEAR(rolled->x(), 640.0, 1e-9);
  EXPECT_NEAR(std::abs(rolled->y() - 360.0), 64.0, 1e-9);
}

TEST(Perturb, StateFrequenciesFollowIndependentDraws) {
  PerturbConfig cfg;
  SplitMix64 rng(2026);
  std::array<int, 4> counts{};
  const FrameState f{Vec3::Zero(), look_at(Vec3(-20, 0, 20), Vec3::Zero())};
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<int>(perturb_pose(f, cfg, {}, rng).state)];
  const double want[4] = {0.16, 0.24, 0.24, 0.36};
  for (int s = 0; s < 4; ++s) EXPECT_NEAR(counts[s] / static_cast<double>(n), want[s], 0.01) << s;
}

TEST(Perturb, OffsetsRespectRadiiAndGround) {
  PerturbConfig cfg;
  cfg.p_pos = cfg.p_rot = 1.0;
  for (OffsetSampling mode : {OffsetSampling::kCubic, OffsetSampling::kSpherical}) {
    cfg.sampling = mode;
    SplitMix64 rng(5);
    const FrameState f{Vec3(1, 2, 0), look_at(Vec3(-20, 0, 20), Vec3(1, 2, 0))};
    for (int i = 0; i < 2000; ++i) {
      const auto r = perturb_pose(f, cfg, {}, rng);
      ASSERT_EQ(r.state, PerturbState::kFull);
      EXPECT_EQ(r.frame.human.z(), 0.0);
      if (mode == OffsetSampling::kCubic) {
        EXPECT_LE(r.drone_offset.cwiseAbs().maxCoeff(), cfg.r_drone);
        EXPECT_LE(r.human_offset.cwiseAbs().maxCoeff(), cfg.r_human);
      } else {
        EXPECT_LE(r.drone_offset.norm(), cfg.r_drone);
        EXPECT_LE(r.human_offset.norm(), cfg.r_human);
      }
      EXPECT_LE(r.rotation_offset_deg.cwiseAbs().maxCoeff(), cfg.theta_max_deg + 1e-12);
      EXPECT_EQ(r.frame.drone.position, f.drone.position + r.drone_offset);
    }
  }
}

TEST(Perturb, RejectedFrameFallsBack) {
  PerturbConfig cfg;
  cfg.p_pos = 1.0;
  SplitMix64 rng(9);
  const FrameState f{Vec3::Zero(), look_at(Vec3(-20, 0, 20), Vec3::Zero())};
  const auto r = perturb_pose(f, cfg, [](const FrameState&) { return false; }, rng);
  EXPECT_TRUE(r.fell_back);
  EXPECT_EQ(r.frame.human, f.human);
  EXPECT_EQ(r.frame.drone.position, f.drone.position);
  EXPECT_EQ(parse_offset_sampling("spherical"), OffsetSampling::kSpherical);
  EXPECT_THROW(parse_offset_sampling("gaussian"), ConfigError);
  cfg.p_rot = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Windows, CountFormula) {
  const WindowConfig cfg;
  EXPECT_EQ(window_count(190, cfg), 61u);
  EXPECT_EQ(window_count(9, cfg), 0u);
  EXPECT_EQ(window_count(10, cfg), 1u);
  for (std::size_t n = 170; n <= 200; ++n) {
    // Count start offsets directly.
    std::size_t brute = 0;
    for (std::size_t s = 0; s + 10 <= n; s += 3) ++brute;
    EXPECT_EQ(window_count(n, cfg), brute);
    EXPECT_GE(brute, 54u);
    EXPECT_LE(brute, 64u);
  }
  WindowConfig bad;
  bad.horizon = 4;
  EXPECT_THROW(window_count(100, bad), ConfigError);
}

TEST(Windows, SlicesPairInputWithTargets) {
  std::vector<Vec3> orig, pert;
  for (int i = 0; i < 25; ++i) {
    orig.emplace_back(i, 0, 0);
    pert.emplace_back(i, 1, 0);
  }
  const auto w = build_sliding_windows(orig, pert, {});
  ASSERT_EQ(w.size(), 6u);
  EXPECT_EQ(w[2].start, 6u);
  EXPECT_EQ(w[2].input.front(), Vec3(6, 1, 0));
  EXPECT_EQ(w[2].denoise_target.back(), Vec3(10, 0, 0));
  EXPECT_EQ(w[2].predict_target.front(), Vec3(11, 0, 0));
  EXPECT_EQ(w[2].predict_target.size(), 5u);
  pert.pop_back();
  EXPECT_THROW(build_sliding_windows(orig, pert, {}), ValidationError);
}

TEST(Weather, SeedFormula) {
  EXPECT_EQ(weather_seed(20260423, 0), 20260483781280ULL);
  EXPECT_EQ(weather_seed(1, 1), 1000003ULL + 7919ULL + 11ULL);
  // Wraps modulo 2^64 like unsigned arithmetic.
  const std::uint64_t big = ~0ULL;
  EXPECT_EQ(weather_seed(big, 0), big * 1000003ULL + 11ULL);
}

TEST(Weather, RandomDrawsAreReproducible) {
  const auto& w = builtin_weather_presets();
  const auto& t = builtin_tod_presets();
  EXPECT_EQ(w.size(), 15u);
  EXPECT_EQ(t.size(), 4u);
  WeatherRequest req;
  req.mode = WeatherMode::kRandomPerPath;
  req.global_seed = 20260423;
  std::set<std::string> seen;
  for (std::uint64_t i = 0; i < 60; ++i) {
    const auto a = resolve_weather(req, i, w, t);
    const auto b = resolve_weather(req, i, w, t);
    ASSERT_TRUE(a && b);
    EXPECT_EQ(a->to_json().dump(), b->to_json().dump());
    // Oracle: the same stream drawn by hand.
    SplitMix64 rng(weather_seed(20260423, i));
    EXPECT_EQ(a->weather.name, w[rng.below(w.size())].name);
    EXPECT_EQ(a->tod.name, t[rng.below(t.size())].name);
    seen.insert(a->weather.name);
    EXPECT_EQ(draw_trajectory_fov(20260423, i), draw_trajectory_fov(20260423, i));
  }
  EXPECT_GT(seen.size(), 5u);
}

TEST(Weather, FixedAndOffModes) {
  const auto& w = builtin_weather_presets();
  const auto& t = builtin_tod_presets();
  WeatherRequest req;
  EXPECT_FALSE(resolve_weather(req, 0, w, t));
  req.mode = WeatherMode::kFixed;
  EXPECT_THROW(resolve_weather(req, 0, w, t), ConfigError);
  req.weather_name = w[3].name;
  req.tod_name = t[1].name;
  const auto sel = resolve_weather(req, 7, w, t);
  EXPECT_EQ(sel->weather.name, w[3].name);
  EXPECT_EQ(sel->tod.name, t[1].name);
  req.weather_name = "volcanic ash";
  EXPECT_THROW(resolve_weather(req, 0, w, t), ConfigError);
  EXPECT_EQ(parse_weather_mode(weather_mode_name(WeatherMode::kRandomPerPath)), WeatherMode::kRandomPerPath);
  EXPECT_THROW(parse_weather_mode("sometimes"), ConfigError);
}

TEST(Weather, PoolFilesMatchBuiltins) {
  const std::filesystem::path dir = COSPLAN_DATA_DIR;
  const auto w = load_weather_pool(dir / "weather_presets.json");
  const auto t = load_tod_pool(dir / "tod_presets.json");
  EXPECT_EQ(weather_pool_to_json(w), weather_pool_to_json(builtin_weather_presets()));
  EXPECT_EQ(tod_pool_to_json(t), tod_pool_to_json(builtin_tod_presets()));
  testing::TempDir tmp("weather");
  std::ofstream(tmp.path() / "bad.json") << R"({"presets": [{"name": "x", "cloudiness": 500, "precipitation": 0,
                                                     "fog_density": 0, "fog_distance": 10}]})";
  EXPECT_THROW(load_weather_pool(tmp.path() / "bad.json"), ConfigError);
  std::ofstream(tmp.path() / "broken.json") << "{";
  EXPECT_THROW(load_weather_pool(tmp.path() / "broken.json"), ParseError);
}

}  // namespace
}  // namespace cosplan
