// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "cosplan/boxmap.hpp"
#include "cosplan/pedplan.hpp"

namespace cosplan {

/// Interface values every drone planner shares.
struct SharedPlannerConfig {
  double dt = 0.5;
  double safety_distance = 3.0;
  double relaxed_safety = 2.5;
  double z_min = 20.0;
  double z_pref = 20.0;
  double z_max = 100.0;
  double behind_distance = 20.0;
  double v_max_drone = 10.0;

  [[nodiscard]] double max_step() const { return v_max_drone * dt; }
  void validate() const;
};

struct VisibilityConfig {
  std::vector<Vec3> offsets{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.8}, {0.0, 0.0, -0.6}, {0.3, 0.0, 0.0}, {-0.3, 0.0, 0.0}};
  /// Hits this close to either ray end are ignored.
  double endpoint_margin = 0.2;
};

/// Fraction of offset rays from the drone to the target that stay clear.
double visibility_5ray(const Vec3& drone, const Vec3& target, const BoxMap& map, const VisibilityConfig& cfg = {});

struct DroneWaypoint {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
};

/// Drone frame i tracks pedestrian frame i.
struct DroneTrajectory {
  std::string path_id;
  std::string planner;
  std::vector<DroneWaypoint> waypoints;
  std::vector<double> visibility;  ///< per frame, filled by annotate_visibility
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json diagnostics = nlohmann::json::object();
  bool failed = false;
  std::string failure;
  double planning_ms = 0.0;  ///< wall time; never serialized into traces

  [[nodiscard]] std::size_t size() const { return waypoints.size(); }
  [[nodiscard]] bool empty() const { return waypoints.empty(); }
  [[nodiscard]] std::vector<Vec3> positions() const;
  void set_positions(const std::vector<Vec3>& pts);
};

DroneTrajectory make_drone_trajectory(const PedTrajectory& ped, const std::vector<Vec3>& pts, std::string planner);

void annotate_visibility(DroneTrajectory& traj, const PedTrajectory& ped, const BoxMap& map,
                         const VisibilityConfig& vis = {});

/// Unit horizontal heading per frame, averaged over a centered window of
/// `window` frames. Frames without motion inherit the nearest defined
/// heading; a fully stationary pedestrian faces +x.
std::vector<Vec2> ped_headings(const PedTrajectory& ped, int window = 5);

/// Pose `behind_distance` behind the target along its heading, at z_pref.
Vec3 behind_pose(const Vec3& target, const Vec2& heading, const SharedPlannerConfig& shared);

/// Moves `p` toward `prev` so that |p - prev| <= limit.
Vec3 clamp_step(const Vec3& p, const Vec3& prev, double limit);

/// Reference follower: the behind pose of every frame, step-clamped, with no
/// obstacle handling. Tagged "follower".
DroneTrajectory plan_follower(const PedTrajectory& ped, const BoxMap& map, const SharedPlannerConfig& shared);

nlohmann::json shared_config_to_json(const SharedPlannerConfig& cfg);
SharedPlannerConfig shared_config_from_json(const nlohmann::json& doc, SharedPlannerConfig base = {});

}  // namespace cosplan
