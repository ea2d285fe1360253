// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/trajectory.hpp"

#include "cosplan/errors.hpp"

namespace cosplan {

void SharedPlannerConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(relaxed_safety <= safety_distance)) throw ConfigError("relaxed safety must not exceed the safety distance");
  if (!(relaxed_safety >= 0.0)) throw ConfigError("relaxed safety must be >= 0");
  if (!(z_min <= z_pref && z_pref <= z_max)) throw ConfigError("altitude envelope must satisfy z_min <= z_pref <= z_max");
  if (!(v_max_drone > 0.0)) throw ConfigError("v_max must be > 0");
  if (!(behind_distance >= 0.0)) throw ConfigError("behind distance must be >= 0");
}

std::vector<Vec3> DroneTrajectory::positions() const {
  std::vector<Vec3> out;
  out.reserve(waypoints.size());
  for (const auto& w : waypoints) out.push_back(w.p);
  return out;
}

void DroneTrajectory::set_positions(const std::vector<Vec3>& pts) {
  if (pts.size() != waypoints.size()) throw ValidationError("position count does not match the trajectory");
  for (std::size_t i = 0; i < pts.size(); ++i) waypoints[i].p = pts[i];
}

DroneTrajectory make_drone_trajectory(const PedTrajectory& ped, const std::vector<Vec3>& pts, std::string planner) {
  if (pts.size() != ped.size()) throw ValidationError("drone trajectory must align with the pedestrian");
  DroneTrajectory traj;
  traj.path_id = ped.id;
  traj.planner = std::move(planner);
  traj.waypoints.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) traj.waypoints[i] = {ped.waypoints[i].t, pts[i]};
  return traj;
}

std::vector<Vec2> ped_headings(const PedTrajectory& ped, int window) {
  const std::size_t n = ped.size();
  std::vector<Vec2> raw(n, Vec2::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 < n ? i + 1 : i;
    raw[i] = (ped.position(b) - ped.position(a)).head<2>();
  }
  const int half = std::max(0, window / 2);
  std::vector<Vec2> out(n, Vec2::Zero());
  std::vector<bool> defined(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 sum = Vec2::Zero();
    const std::size_t lo = i >= static_cast<std::size_t>(half) ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    for (std::size_t k = lo; k <= hi; ++k) {
      const double len = raw[k].norm();
      if (len > 1e-12) sum += raw[k] / len;
    }
    if (sum.norm() > 1e-9) {
      out[i] = sum.normalized();
      defined[i] = true;
    }
  }
  // Fill gaps from the nearest defined frame, preferring the earlier one.
  for (std::size_t i = 0; i < n; ++i) {
    if (defined[i]) continue;
    std::size_t best = n;
    for (std::size_t d = 1; d < n && best == n; ++d) {
      if (i >= d && defined[i - d]) best = i - d;
      else if (i + d < n && defined[i + d]) best = i + d;
    }
    out[i] = best < n ? out[best] : Vec2::UnitX();
  }
  return out;
}

Vec3 behind_pose(const Vec3& target, const Vec2& heading, const SharedPlannerConfig& shared) {
  return {target.x() - shared.behind_distance * heading.x(), target.y() - shared.behind_distance * heading.y(),
          shared.z_pref};
}

Vec3 clamp_step(const Vec3& p, const Vec3& prev, double limit) {
  const Vec3 d = p - prev;
  const double len = d.norm();
  if (len <= limit) return p;
  return prev + d * (limit / len);
}

DroneTrajectory plan_follower(const PedTrajectory& ped, const BoxMap& map, const SharedPlannerConfig& shared) {
  shared.validate();
  if (ped.size() == 0) throw ValidationError("empty pedestrian trajectory");
  const auto heading = ped_headings(ped);
  std::vector<Vec3> pts(ped.size());
  for (std::size_t i = 0; i < ped.size(); ++i) {
    pts[i] = behind_pose(ped.position(i), heading[i], shared);
    if (i > 0) pts[i] = clamp_step(pts[i], pts[i - 1], shared.max_step());
  }
  auto traj = make_drone_trajectory(ped, pts, "follower");
  traj.config = {{"shared", shared_config_to_json(shared)}};
  annotate_visibility(traj, ped, map);
  return traj;
}

nlohmann::json shared_config_to_json(const SharedPlannerConfig& c) {
  return {{"dt", c.dt},
          {"safety_distance", c.safety_distance},
          {"relaxed_safety", c.relaxed_safety},
          {"z_min", c.z_min},
          {"z_pref", c.z_pref},
          {"z_max", c.z_max},
          {"behind_distance", c.behind_distance},
          {"v_max_drone", c.v_max_drone}};
}

SharedPlannerConfig shared_config_from_json(const nlohmann::json& doc, SharedPlannerConfig c) {
  c.dt = doc.value("dt", c.dt);
  c.safety_distance = doc.value("safety_distance", c.safety_distance);
  c.relaxed_safety = doc.value("relaxed_safety", c.relaxed_safety);
  c.z_min = doc.value("z_min", c.z_min);
  c.z_pref = doc.value("z_pref", c.z_pref);
  c.z_max = doc.value("z_max", c.z_max);
  c.behind_distance = doc.value("behind_distance", c.behind_distance);
  c.v_max_drone = doc.value("v_max_drone", c.v_max_drone);
  c.validate();
  return c;
}

}  // namespace cosplan
