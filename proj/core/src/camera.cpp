// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "cosplan/augment.hpp"
#include "cosplan/errors.hpp"

namespace cosplan {

double fov_to_focal(double fov_deg, double width_px) {
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw ConfigError("field of view must lie in (0, 180) degrees");
  if (!(width_px > 0.0)) throw ConfigError("image width must be > 0");
  return width_px / (2.0 * std::tan(fov_deg * kPi / 360.0));
}

double focal_to_fov(double focal_px, double width_px) {
  if (!(focal_px > 0.0 && width_px > 0.0)) throw ConfigError("focal length and width must be > 0");
  return 2.0 * rad2deg(std::atan(width_px / (2.0 * focal_px)));
}

Eigen::Matrix3d CameraIntrinsics::K() const {
  const double f = focal();
  Eigen::Matrix3d k;
  k << f, 0.0, width / 2.0, 0.0, f, height / 2.0, 0.0, 0.0, 1.0;
  return k;
}

nlohmann::json CameraIntrinsics::to_json() const {
  const Eigen::Matrix3d k = K();
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({k(r, 0), k(r, 1), k(r, 2)});
  return {{"width", width}, {"height", height}, {"fov_deg", fov_deg}, {"f_pixels", focal()}, {"K", rows}};
}

CameraPose look_at(const Vec3& position, const Vec3& target) {
  const Vec3 d = target - position;
  CameraPose p;
  p.position = position;
  p.yaw_deg = rad2deg(std::atan2(d.y(), d.x()));
  p.pitch_deg = rad2deg(std::atan2(d.z(), d.head<2>().norm()));
  return p;
}

std::optional<Eigen::Vector2d> project_point(const CameraIntrinsics& cam, const CameraPose& pose, const Vec3& world) {
  const double cy = std::cos(deg2rad(pose.yaw_deg)), sy = std::sin(deg2rad(pose.yaw_deg));
  const double cp = std::cos(deg2rad(pose.pitch_deg)), sp = std::sin(deg2rad(pose.pitch_deg));
  const double cr = std::cos(deg2rad(pose.roll_deg)), sr = std::sin(deg2rad(pose.roll_deg));
  const Vec3 forward(cp * cy, cp * sy, sp);
  const Vec3 right0(sy, -cy, 0.0);
  const Vec3 up0 = right0.cross(forward);
  const Vec3 right = cr * right0 + sr * up0;
  const Vec3 up = cr * up0 - sr * right0;

  const Vec3 d = world - pose.position;
  const double z = d.dot(forward);
  if (!(z > 0.0)) return std::nullopt;
  const double f = cam.focal();
  return Eigen::Vector2d(f * d.dot(right) / z + cam.width / 2.0, f * -d.dot(up) / z + cam.height / 2.0);
}

bool target_in_frustum(const CameraIntrinsics& cam, const CameraPose& pose, const Vec3& target) {
  const auto px = project_point(cam, pose, target);
  return px && px->x() >= 0.0 && px->x() < cam.width && px->y() >= 0.0 && px->y() < cam.height;
}

}  // namespace cosplan
