// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

// Shared state for the reference planners. Not installed.

#pragma once

#include <optional>
#include <string>

#include "cosplan/baselines.hpp"

namespace cosplan::baseline_detail {

struct Problem {
  const BoxMap& map;
  const SharedPlannerConfig& shared;
  const BaselineConfig& cfg;
  Vec3 start;
  Vec3 goal;
  Aabb bounds;  ///< sampling / search volume, z within the altitude envelope

  [[nodiscard]] bool point_free(const Vec3& p) const;
  [[nodiscard]] bool segment_free(const Vec3& a, const Vec3& b) const;
  [[nodiscard]] bool in_bounds(const Vec3& p) const { return bounds.contains(p); }
};

/// A geometric path from start to (near) goal plus per-kind diagnostics.
struct PathResult {
  std::vector<Vec3> path;
  std::string failure;  ///< empty on success
  nlohmann::json diagnostics = nlohmann::json::object();
};

PathResult search_grid(const Problem& pb, double epsilon, bool any_angle);
PathResult search_visibility_graph(const Problem& pb);

PathResult rrt_star(const Problem& pb, std::uint64_t seed);
PathResult prm(const Problem& pb, std::uint64_t seed);
PathResult bspline_prm(const Problem& pb, std::uint64_t seed);

PathResult elastic_band(const Problem& pb);
PathResult minimum_jerk(const Problem& pb);
PathResult potential_field(const Problem& pb);
PathResult chomp_lite(const Problem& pb);
PathResult quasi_newton_trajopt(const Problem& pb);

/// Greedy line-of-sight shortcutting.
std::vector<Vec3> shortcut(const Problem& pb, const std::vector<Vec3>& path);

/// Straight start -> goal polyline with roughly `spacing` between points
/// (at least 8 points).
std::vector<Vec3> straight_line(const Vec3& a, const Vec3& b, double spacing);

double polyline_length(const std::vector<Vec3>& path);

}  // namespace cosplan::baseline_detail
