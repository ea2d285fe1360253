// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include <stdlib.h>

#include <cmath>
#include <stdexcept>

#include "cosplan/rng.hpp"
#include "cosplan/trajectory.hpp"

namespace cosplan::testing {

BoxMap make_map(const std::vector<Aabb>& boxes, const std::string& label) {
  std::vector<BoxRecord> recs;
  std::uint64_t id = 1;
  for (const auto& b : boxes) recs.push_back(BoxRecord::from_aabb(label, 1, "#808080", id++, b));
  return BoxMap(std::move(recs));
}

PedTrajectory straight_walk(const Vec3& start, const Vec2& dir, int frames, double speed, double dt,
                            const std::string& id) {
  const Vec2 u = dir.normalized();
  std::vector<Vec3> pts;
  for (int i = 0; i < frames; ++i) {
    const double s = speed * dt * i;
    pts.emplace_back(start.x() + u.x() * s, start.y() + u.y() * s, start.z());
  }
  return make_ped_trajectory(pts, dt, id);
}

PedTrajectory stationary_target(const Vec3& p, int frames, double dt) {
  return make_ped_trajectory(std::vector<Vec3>(static_cast<std::size_t>(frames), p), dt, "stationary");
}

Scenario random_scenario(std::uint64_t seed) {
  SplitMix64 rng(derive_seed(seed, 0x5CE));
  const int frames = 40;
  const double dt = 0.5;
  const double speed = rng.uniform(1.0, 1.4);
  double heading = rng.uniform(-M_PI, M_PI);
  const double turn = rng.uniform(-0.02, 0.02);
  std::vector<Vec3> pts{Vec3::Zero()};
  for (int i = 1; i < frames; ++i) {
    heading += turn;
    pts.push_back(pts.back() + Vec3(std::cos(heading), std::sin(heading), 0.0) * speed * dt);
  }
  Scenario sc;
  sc.name = "random_" + std::to_string(seed);
  sc.ped = make_ped_trajectory(pts, dt, sc.name);

  SharedPlannerConfig shared;
  const auto hd = ped_headings(sc.ped);
  const Vec3 first_pose = behind_pose(pts.front(), hd.front(), shared);
  const Vec3 last_pose = behind_pose(pts.back(), hd.back(), shared);

  std::vector<Aabb> boxes;
  const int want = 4 + static_cast<int>(rng.below(5));
  for (int attempt = 0; attempt < 400 && static_cast<int>(boxes.size()) < want; ++attempt) {
    const Vec3& anchor = pts[rng.below(pts.size())];
    const Vec3 c(anchor.x() + rng.uniform(-35.0, 35.0), anchor.y() + rng.uniform(-35.0, 35.0), 0.0);
    const Vec3 half(rng.uniform(1.5, 6.0), rng.uniform(1.5, 6.0), 0.0);
    const double h = rng.uniform(10.0, 45.0);
    const Aabb b{Vec3(c.x() - half.x(), c.y() - half.y(), 0.0), Vec3(c.x() + half.x(), c.y() + half.y(), h)};
    bool ok = signed_distance(b, first_pose) > 8.0 && signed_distance(b, last_pose) > 8.0;
    for (const auto& p : pts) {
      const Vec3 q(p.x(), p.y(), std::min(h, 1.0));
      if (signed_distance(b, q) < 4.0) ok = false;
    }
    if (ok) boxes.push_back(b);
  }
  sc.map = make_map(boxes);
  return sc;
}

Scenario clutter_scenario(std::uint64_t seed) {
  SplitMix64 rng(derive_seed(seed, 0xC1A));
  Scenario sc;
  sc.name = "clutter_" + std::to_string(seed);
  sc.ped = straight_walk(Vec3::Zero(), Vec2(1.0, 0.0), 40, rng.uniform(1.0, 1.4), 0.5, sc.name);
  SharedPlannerConfig shared;
  const auto hd = ped_headings(sc.ped);
  const Vec3 first_pose = behind_pose(sc.ped.position(0), hd.front(), shared);
  const Vec3 last_pose = behind_pose(sc.ped.position(sc.ped.size() - 1), hd.back(), shared);

  // Pillars in the corridor swept by the straight-behind poses.
  std::vector<Aabb> boxes;
  const int want = 6 + static_cast<int>(rng.below(5));
  for (int attempt = 0; attempt < 400 && static_cast<int>(boxes.size()) < want; ++attempt) {
    const double x = rng.uniform(first_pose.x() + 4.0, last_pose.x() - 4.0);
    const double y = rng.uniform(-6.0, 6.0);
    const double hw = rng.uniform(0.5, 1.5);
    const Aabb b{Vec3(x - hw, y - hw, 0.0), Vec3(x + hw, y + hw, rng.uniform(25.0, 40.0))};
    bool ok = signed_distance(b, first_pose) > 4.0 && signed_distance(b, last_pose) > 4.0;
    for (std::size_t i = 0; i < sc.ped.size(); ++i) {
      const Vec3& p = sc.ped.position(i);
      if (signed_distance(b, Vec3(p.x(), p.y(), 1.0)) < 4.0) ok = false;
    }
    for (const auto& o : boxes)
      if (std::abs(o.center().x() - x) < 3.0 + hw && std::abs(o.center().y() - y) < 3.0 + hw) ok = false;
    if (ok) boxes.push_back(b);
  }
  sc.map = make_map(boxes);
  return sc;
}

Scenario deck_fixture(std::uint64_t seed) {
  SplitMix64 rng(derive_seed(seed, 0xDEC));
  Scenario sc;
  sc.name = "deck_" + std::to_string(seed);
  const double x0 = rng.uniform(12.0, 18.0);
  const double len = rng.uniform(20.0, 30.0);
  const double half_w = rng.uniform(3.0, 5.0);
  const double z0 = rng.uniform(7.0, 9.0);
  sc.map = make_map({Aabb{Vec3(x0, -half_w, z0), Vec3(x0 + len, half_w, z0 + rng.uniform(2.0, 4.0))}}, "Walls");
  sc.ped = straight_walk(Vec3::Zero(), Vec2(1.0, 0.0), 48, 1.2, 0.5, sc.name);
  return sc;
}

Scenario beam_fixture(std::uint64_t seed) {
  SplitMix64 rng(derive_seed(seed, 0xBEA));
  Scenario sc;
  sc.name = "beam_" + std::to_string(seed);
  std::vector<Aabb> beams;
  // Crossbeams across the walk at height h: the straight-behind sight line
  // crosses a beam at x_b while the target is about h metres past it.
  double xb = rng.uniform(4.0, 8.0);
  for (int k = 0; k < 3; ++k) {
    const double h = rng.uniform(9.0, 12.0);
    const double t = rng.uniform(0.4, 0.7);
    beams.push_back(Aabb{Vec3(xb, -15.0, h), Vec3(xb + t, 15.0, h + t)});
    xb += rng.uniform(12.0, 16.0);
  }
  sc.map = make_map(beams, "Walls");
  sc.ped = straight_walk(Vec3::Zero(), Vec2(1.0, 0.0), 48, 1.2, 0.5, sc.name);
  return sc;
}

Scenario wall_fixture(std::uint64_t seed) {
  SplitMix64 rng(derive_seed(seed, 0x3A11));
  Scenario sc;
  sc.name = "wall_" + std::to_string(seed);
  const double x0 = rng.uniform(8.0, 20.0);
  const double z0 = rng.uniform(8.0, 12.0);
  const double t = rng.uniform(0.5, 1.5);
  const double h = rng.uniform(0.5, 2.0);
  sc.map = make_map({Aabb{Vec3(x0, -15.0, z0), Vec3(x0 + t, 15.0, z0 + h)}}, "Walls");
  sc.ped = straight_walk(Vec3::Zero(), Vec2(1.0, 0.0), 48, 1.2, 0.5, sc.name);
  return sc;
}

BoxMap cage_map(const Vec3& center, int slabs, double thickness, double half_width) {
  std::vector<Aabb> boxes;
  const double z0 = center.z() - 0.5 * slabs * thickness;
  for (int i = 0; i < slabs; ++i)
    boxes.push_back(Aabb{Vec3(center.x() - half_width, center.y() - half_width, z0 + i * thickness),
                         Vec3(center.x() + half_width, center.y() + half_width, z0 + (i + 1) * thickness)});
  return make_map(boxes, "Walls");
}

TempDir::TempDir(const std::string& tag) {
  std::string tmpl = (std::filesystem::temp_directory_path() / ("cosplan_" + tag + "_XXXXXX")).string();
  if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace cosplan::testing
