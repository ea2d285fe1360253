// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/trajectory.hpp"

namespace cosplan {

double visibility_5ray(const Vec3& drone, const Vec3& target, const BoxMap& map, const VisibilityConfig& cfg) {
  if (cfg.offsets.empty()) return 1.0;
  int clear = 0;
  for (const Vec3& off : cfg.offsets) {
    const Vec3 end = target + off;
    if (end == drone || !map.segment_blocked(drone, end, cfg.endpoint_margin)) ++clear;
  }
  return static_cast<double>(clear) / static_cast<double>(cfg.offsets.size());
}

void annotate_visibility(DroneTrajectory& traj, const PedTrajectory& ped, const BoxMap& map,
                         const VisibilityConfig& vis) {
  traj.visibility.assign(traj.size(), 0.0);
  for (std::size_t i = 0; i < traj.size() && i < ped.size(); ++i)
    traj.visibility[i] = visibility_5ray(traj.waypoints[i].p, ped.position(i), map, vis);
}

}  // namespace cosplan
