// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string_view>

#include "cosplan/trajectory.hpp"

namespace cosplan {

/// Reference planners. None of them looks at target visibility.
enum class BaselineKind {
  kAstar3d,
  kWeightedAstar,
  kThetaStar,
  kVisibilityAstar,
  kRrtStar,
  kPrm,
  kBsplinePrm,
  kElasticBand,
  kMinimumJerk,
  kPotentialField,
  kChompLite,
  kQuasiNewtonTrajopt,
};

const std::array<BaselineKind, 12>& all_baseline_kinds();
std::string_view baseline_name(BaselineKind kind);
/// Throws ConfigError for unknown names.
BaselineKind parse_baseline_kind(std::string_view name);

struct BaselineConfig {
  // Search kinds.
  double voxel = 2.0;
  double weighted_epsilon = 1.5;
  std::size_t max_expansions = 400000;
  // Geometry shared by all kinds: waypoints keep this much clearance,
  // segments are checked against boxes grown by half of it.
  double clearance_margin = 2.0;
  double goal_radius = 2.0;
  double bounds_padding = 30.0;
  /// Planning volume tops out this far above z_pref (and at z_max).
  double vertical_extent = 40.0;
  /// The start and goal anchors move at most this far to reach free space.
  double anchor_search_radius = 24.0;
  // Sampling kinds.
  double rrt_step = 4.0;
  int rrt_samples = 5000;
  double rrt_rewire_radius = 8.0;
  double goal_bias = 0.05;
  int prm_samples = 2000;
  int prm_k = 10;
  bool shortcut_sampling = true;
  // Optimization kinds.
  double path_spacing = 2.0;
  int elastic_sweeps = 50;
  double elastic_step = 0.2;
  int minjerk_decimation = 5;
  double pf_attractive_gain = 1.0;
  double pf_repulsive_gain = 5.0;
  double pf_influence = 8.0;
  int pf_steps = 500;
  double pf_step_size = 1.0;
  int chomp_iters = 100;
  double chomp_epsilon = 4.0;
  double chomp_obstacle_weight = 4.0;
  double chomp_step = 0.5;
  int qn_iters = 200;
  int qn_memory = 8;
  double qn_clearance_weight = 10.0;
  // Post-processing.
  bool repair_enabled = true;
  double repair_margin = 0.05;
  int repair_rounds = 10;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

nlohmann::json baseline_config_to_json(const BaselineConfig& cfg);
BaselineConfig baseline_config_from_json(const nlohmann::json& doc, BaselineConfig base = {});

/// Plans start -> goal region behind the last target pose, resamples onto the
/// pedestrian timestamps, then repairs collisions if enabled. A planning
/// failure is returned as a trajectory with `failed` set, not thrown.
DroneTrajectory plan_baseline(BaselineKind kind, const PedTrajectory& ped, const BoxMap& map,
                              const SharedPlannerConfig& shared, const BaselineConfig& cfg);

/// Positions at arc length min(L, i * min(max_step, L / (n - 1))) along
/// the polyline, for i in [0, n).
std::vector<Vec3> resample_arc_length(const std::vector<Vec3>& path, std::size_t n, double max_step);

struct RepairConfig {
  double margin = 0.05;
  int rounds = 10;
};

/// Pushes colliding waypoints along the nearest-surface normal until their
/// clearance reaches `margin`. Unresolved waypoints are listed in
/// diagnostics["repair"]["residual_frames"].
DroneTrajectory repair_collisions(const DroneTrajectory& traj, const BoxMap& map, const SharedPlannerConfig& shared,
                                  const RepairConfig& cfg = {});

}  // namespace cosplan
