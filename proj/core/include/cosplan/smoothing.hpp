// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cosplan/tastar.hpp"

namespace cosplan {

struct SmoothConfig {
  int shortcut_span = 12;
  int elastic_iters = 30;
  double elastic_step_min = 0.02;
  double elastic_step_max = 0.35;
  double per_frame_vis_drop = 0.10;
  double mean_vis_drop = 0.05;
  /// Frames whose raw visibility reaches this value may not lose any.
  double anchor_threshold = 0.999;
  VisibilityConfig visibility;

  void validate() const;
};

nlohmann::json smooth_config_to_json(const SmoothConfig& cfg);
SmoothConfig smooth_config_from_json(const nlohmann::json& doc, SmoothConfig base = {});

/// Shortcut pass, then elastic relaxation. Every candidate waypoint must keep
/// clearance >= safety_distance, stay in the altitude envelope, respect the
/// per-frame displacement cap and keep its visibility within the per-frame
/// drop of the raw value (no drop at anchors). If the result fails the final
/// mean-drop or clearance check, `raw` is returned unchanged.
DroneTrajectory smooth_trajectory(const DroneTrajectory& raw, const PedTrajectory& ped, const BoxMap& map,
                                  const SharedPlannerConfig& shared, const SmoothConfig& cfg);

/// plan_tastar followed by smooth_trajectory; tagged "tastar_smooth".
DroneTrajectory plan_tastar_smooth(const PedTrajectory& ped, const BoxMap& map, const SharedPlannerConfig& shared,
                                   const TaStarConfig& tcfg, const SmoothConfig& scfg);

}  // namespace cosplan
