// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "cosplan/baselines.hpp"

namespace cosplan {

DroneTrajectory repair_collisions(const DroneTrajectory& traj, const BoxMap& map, const SharedPlannerConfig& shared,
                                  const RepairConfig& cfg) {
  DroneTrajectory out = traj;
  std::vector<Vec3> pts = out.positions();
  std::size_t moved = 0;
  nlohmann::json residual = nlohmann::json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (map.signed_clearance(pts[i]) >= 0.0) continue;
    Vec3 p = pts[i];
    SurfaceHit hit = map.nearest_surface(p);
    // Each round clears the current nearest box; a push can land inside a
    // neighbour, which the next round handles.
    for (int round = 0; round < cfg.rounds && hit.clearance < cfg.margin; ++round) {
      p += hit.normal * (cfg.margin - hit.clearance + 1e-9);
      p.z() = std::clamp(p.z(), shared.z_min, shared.z_max);
      hit = map.nearest_surface(p);
    }
    if (hit.clearance >= 0.0) {
      pts[i] = p;
      ++moved;
    } else {
      residual.push_back(i);
    }
  }
  out.set_positions(pts);
  const double frac = pts.empty() ? 0.0 : static_cast<double>(residual.size()) / static_cast<double>(pts.size());
  out.diagnostics["repair"] = {{"moved_waypoints", moved},
                               {"residual_frames", residual},
                               {"residual_collision_fraction", frac}};
  return out;
}

}  // namespace cosplan
