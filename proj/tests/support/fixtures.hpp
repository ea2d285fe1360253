// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Scene builders shared by the unit, property and acceptance tests.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cosplan/boxmap.hpp"
#include "cosplan/pedplan.hpp"

namespace cosplan::testing {

BoxMap make_map(const std::vector<Aabb>& boxes, const std::string& label = "Buildings");

/// Constant-speed walk along `dir` on the ground plane.
PedTrajectory straight_walk(const Vec3& start, const Vec2& dir, int frames, double speed = 1.2, double dt = 0.5,
                            const std::string& id = "walk");

/// Target that never moves.
PedTrajectory stationary_target(const Vec3& p, int frames, double dt = 0.5);

struct Scenario {
  std::string name;
  BoxMap map;
  PedTrajectory ped;
};

/// Property-suite scene: a 40-frame walk with a gentle turn among a handful
/// of random boxes. Boxes keep >= 4 m from the walk and stay clear of the
/// first behind pose, so every planner can start.
Scenario random_scenario(std::uint64_t seed);

/// Straight walk with 6-10 tall pillars standing in the corridor the
/// straight-behind drone would sweep.
Scenario clutter_scenario(std::uint64_t seed);

/// Eastward walk under an elevated deck (a horizontal wall at 8-12 m) that
/// hides the target from anything flying straight behind it at 20 m.
Scenario deck_fixture(std::uint64_t seed);

/// Eastward walk past thin crossbeams that clip the straight-behind sight
/// line for a few frames each.
Scenario beam_fixture(std::uint64_t seed);

/// One elevated wall across the walk, 0.5-2 m tall and 0.5-1.5 m thick with
/// its base at 8-12 m. It hides the target from the straight-behind pose
/// for a few frames only.
Scenario wall_fixture(std::uint64_t seed);

/// Thin adjacent slabs stacked around a point: every push-out lands in a
/// neighbour, so repair cannot free it.
BoxMap cage_map(const Vec3& center, int slabs = 31, double thickness = 1.0, double half_width = 40.0);

/// Removed recursively on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace cosplan::testing
