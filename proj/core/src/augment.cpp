// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/augment.hpp"

#include <algorithm>
#include <cmath>

#include "cosplan/errors.hpp"

namespace cosplan {

OffsetSampling parse_offset_sampling(std::string_view name) {
  if (name == "cubic") return OffsetSampling::kCubic;
  if (name == "spherical") return OffsetSampling::kSpherical;
  throw ConfigError("offset sampling must be 'cubic' or 'spherical'");
}

void PerturbConfig::validate() const {
  if (!(p_pos >= 0.0 && p_pos <= 1.0 && p_rot >= 0.0 && p_rot <= 1.0))
    throw ConfigError("perturbation probabilities must lie in [0, 1]");
  if (!(r_human >= 0.0 && r_drone >= 0.0 && r_look >= 0.0)) throw ConfigError("perturbation radii must be >= 0");
  if (!(theta_max_deg >= 0.0)) throw ConfigError("theta_max must be >= 0");
}

std::string_view perturb_state_name(PerturbState s) {
  switch (s) {
    case PerturbState::kNone: return "none";
    case PerturbState::kPosOnly: return "pos_only";
    case PerturbState::kRotOnly: return "rot_only";
    case PerturbState::kFull: return "full";
  }
  return "unknown";
}

Vec3 sample_offset(double radius, OffsetSampling mode, SplitMix64& rng) {
  if (radius <= 0.0) return Vec3::Zero();
  if (mode == OffsetSampling::kCubic)
    return {rng.uniform(-radius, radius), rng.uniform(-radius, radius), rng.uniform(-radius, radius)};
  for (;;) {
    const Vec3 u(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    if (u.squaredNorm() <= 1.0) return u * radius;
  }
}

PerturbResult perturb_pose(const FrameState& frame, const PerturbConfig& cfg, const PoseValidity& valid,
                           SplitMix64& rng) {
  const bool pos = rng.bernoulli(cfg.p_pos);
  const bool rot = rng.bernoulli(cfg.p_rot);
  PerturbResult r;
  r.frame = frame;
  r.state = pos ? (rot ? PerturbState::kFull : PerturbState::kPosOnly)
                : (rot ? PerturbState::kRotOnly : PerturbState::kNone);
  if (r.state == PerturbState::kNone) return r;

  FrameState out = frame;
  if (pos) {
    r.human_offset = sample_offset(cfg.r_human, cfg.sampling, rng);
    r.human_offset.z() = 0.0;  // the pedestrian stays on the ground
    r.drone_offset = sample_offset(cfg.r_drone, cfg.sampling, rng);
    out.human += r.human_offset;
    out.drone.position += r.drone_offset;
  }
  if (rot) {
    const Vec3 look = out.human + sample_offset(cfg.r_look, cfg.sampling, rng);
    const CameraPose aimed = look_at(out.drone.position, out.human);
    const CameraPose jittered = look_at(out.drone.position, look);
    const double t = cfg.theta_max_deg;
    const double dpitch = std::clamp(jittered.pitch_deg - aimed.pitch_deg, -t, t);
    const double dyaw = std::clamp(rad2deg(wrap_angle(deg2rad(jittered.yaw_deg - aimed.yaw_deg))), -t, t);
    r.rotation_offset_deg = Vec3(0.0, dpitch, dyaw);
    out.drone.pitch_deg += dpitch;
    out.drone.yaw_deg += dyaw;
  }
  if (valid && !valid(out)) {
    r.fell_back = true;
    return r;
  }
  r.frame = out;
  return r;
}

void WindowConfig::validate() const {
  if (window < 1 || observe < 1 || horizon < 0 || stride < 1) throw ConfigError("window sizes must be positive");
  if (observe + horizon != window) throw ConfigError("observe + horizon must equal the window length");
}

std::size_t window_count(std::size_t n, const WindowConfig& cfg) {
  cfg.validate();
  const auto w = static_cast<std::size_t>(cfg.window);
  return n < w ? 0 : (n - w) / static_cast<std::size_t>(cfg.stride) + 1;
}

std::vector<WindowSample> build_sliding_windows(const std::vector<Vec3>& original, const std::vector<Vec3>& perturbed,
                                                const WindowConfig& cfg) {
  if (original.size() != perturbed.size()) throw ValidationError("original and perturbed tracks differ in length");
  const std::size_t count = window_count(original.size(), cfg);
  const auto obs = static_cast<std::ptrdiff_t>(cfg.observe);
  const auto win = static_cast<std::ptrdiff_t>(cfg.window);
  std::vector<WindowSample> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = k * static_cast<std::size_t>(cfg.stride);
    const auto o = original.begin() + static_cast<std::ptrdiff_t>(i);
    const auto p = perturbed.begin() + static_cast<std::ptrdiff_t>(i);
    out.push_back({i, {p, p + obs}, {o, o + obs}, {o + obs, o + win}});
  }
  return out;
}

}  // namespace cosplan
