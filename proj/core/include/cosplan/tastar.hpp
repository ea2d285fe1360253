// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cosplan/trajectory.hpp"

namespace cosplan {

/// Layered beam search over a (x, y, z, frame) voxel lattice. Lattice points
/// sit at integer multiples of `voxel` from the world origin.
struct TaStarConfig {
  double voxel = 4.0;
  int beam_width = 2048;
  double corridor_margin = 45.0;  ///< horizontal radius around the target
  double w_tracking = 2.0;
  double w_visibility = 18.0;
  double w_path = 1.0;
  double w_safety = 8.0;
  double w_smooth = 0.15;
  double w_altitude = 0.5;  ///< (z - z_pref)^2; keeps the ring tracking term from drifting upward
  /// Clearance below which the safety hinge starts to charge.
  double safety_influence = 8.0;
  /// How far around the nominal start pose to look for a feasible voxel.
  double start_search_radius = 24.0;
  VisibilityConfig visibility;

  void validate() const;
};

nlohmann::json tastar_config_to_json(const TaStarConfig& cfg);
TaStarConfig tastar_config_from_json(const nlohmann::json& doc, TaStarConfig base = {});

/// Stage cost for arriving at `p` at frame i from `prev` (and `prev2` for the
/// turn penalty). Exposed for tests.
struct TaStarStage {
  double tracking = 0.0;
  double visibility = 0.0;
  double path = 0.0;
  double safety = 0.0;
  double smooth = 0.0;
  double altitude = 0.0;
  [[nodiscard]] double total() const { return tracking + visibility + path + safety + smooth + altitude; }
};

TaStarStage tastar_stage_cost(const Vec3& p, const Vec3* prev, const Vec3* prev2, const Vec3& target, double vis,
                              double clearance, const SharedPlannerConfig& shared, const TaStarConfig& cfg);

/// Throws PlanningError when no start voxel is feasible or the beam dies.
DroneTrajectory plan_tastar(const PedTrajectory& ped, const BoxMap& map, const SharedPlannerConfig& shared,
                            const TaStarConfig& cfg);

}  // namespace cosplan
