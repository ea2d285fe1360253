// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cosplan/geometry.hpp"
#include "cosplan/rng.hpp"

namespace cosplan {

// ---- Camera -----------------------------------------------------------------

/// W / (2 tan(fov / 2)). Throws ConfigError unless 0 < fov < 180 and W > 0.
double fov_to_focal(double fov_deg, double width_px);
/// Inverse of fov_to_focal, in degrees.
double focal_to_fov(double focal_px, double width_px);

struct CameraIntrinsics {
  int width = 1280;
  int height = 720;
  double fov_deg = 90.0;

  [[nodiscard]] double focal() const { return fov_to_focal(fov_deg, width); }
  /// fx = fy = focal, principal point at the image center.
  [[nodiscard]] Eigen::Matrix3d K() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

inline constexpr double kZoomLevelsDeg[4] = {30.0, 60.0, 90.0, 110.0};

/// Camera pose in the world frame. Yaw about +z from +x, pitch positive
/// upward, roll about the viewing axis; all in degrees.
struct CameraPose {
  Vec3 position = Vec3::Zero();
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  double yaw_deg = 0.0;
};

CameraPose look_at(const Vec3& position, const Vec3& target);

/// Pixel coordinates of a world point, or nullopt when it lies behind the
/// camera.
std::optional<Eigen::Vector2d> project_point(const CameraIntrinsics& cam, const CameraPose& pose, const Vec3& world);

/// Positive depth and a pixel inside the image.
bool target_in_frustum(const CameraIntrinsics& cam, const CameraPose& pose, const Vec3& target);

// ---- Pose perturbation ---------------------------------------------------------

enum class OffsetSampling { kCubic, kSpherical };
OffsetSampling parse_offset_sampling(std::string_view name);

struct PerturbConfig {
  double p_pos = 0.6;
  double p_rot = 0.6;
  double r_human = 2.0;  ///< m
  double r_drone = 3.0;  ///< m
  /// Radius of the look-at offset around the target for rotation draws.
  double r_look = 2.0;
  double theta_max_deg = 5.0;
  OffsetSampling sampling = OffsetSampling::kCubic;

  void validate() const;
};

struct FrameState {
  Vec3 human = Vec3::Zero();
  CameraPose drone;
};

enum class PerturbState { kNone, kPosOnly, kRotOnly, kFull };
std::string_view perturb_state_name(PerturbState s);

struct PerturbResult {
  FrameState frame;
  PerturbState state = PerturbState::kNone;
  bool fell_back = false;
  Vec3 human_offset = Vec3::Zero();
  Vec3 drone_offset = Vec3::Zero();
  Vec3 rotation_offset_deg = Vec3::Zero();  ///< roll, pitch, yaw
};

using PoseValidity = std::function<bool(const FrameState&)>;

/// Cubic: independent uniform per axis in [-r, r]. Spherical: uniform in the
/// ball of radius r (rejection sampling).
Vec3 sample_offset(double radius, OffsetSampling mode, SplitMix64& rng);

/// Two independent Bernoulli draws choose the state. Position draws move the
/// pedestrian in xy only (its height stays on the ground) and the drone in
/// 3D; rotation draws re-aim at a jittered look-at point with per-axis angle
/// change clipped to theta_max. If `valid` rejects the perturbed frame the
/// input frame is returned and fell_back is set.
PerturbResult perturb_pose(const FrameState& frame, const PerturbConfig& cfg, const PoseValidity& valid,
                           SplitMix64& rng);

// ---- Sliding windows -------------------------------------------------------------

struct WindowConfig {
  int window = 10;
  int observe = 5;
  int horizon = 5;
  int stride = 3;
  void validate() const;
};

struct WindowSample {
  std::size_t start = 0;
  std::vector<Vec3> input;           ///< perturbed [start, start + observe)
  std::vector<Vec3> denoise_target;  ///< original [start, start + observe)
  std::vector<Vec3> predict_target;  ///< original [start + observe, start + window)
};

/// floor((N - window) / stride) + 1 samples, none when N < window.
std::size_t window_count(std::size_t n, const WindowConfig& cfg);
std::vector<WindowSample> build_sliding_windows(const std::vector<Vec3>& original, const std::vector<Vec3>& perturbed,
                                                const WindowConfig& cfg);

// ---- Weather and time of day --------------------------------------------------------

struct WeatherPreset {
  std::string name;
  double cloudiness = 0.0;
  double precipitation = 0.0;
  double fog_density = 0.0;
  double fog_distance = 0.0;  ///< m
};

struct TodPreset {
  std::string name;
  double sun_altitude = 0.0;  ///< deg
  double sun_azimuth = 0.0;   ///< deg
};

const std::vector<WeatherPreset>& builtin_weather_presets();
const std::vector<TodPreset>& builtin_tod_presets();
std::vector<WeatherPreset> load_weather_pool(const std::filesystem::path& path);
std::vector<TodPreset> load_tod_pool(const std::filesystem::path& path);
nlohmann::json weather_pool_to_json(const std::vector<WeatherPreset>& pool);
nlohmann::json tod_pool_to_json(const std::vector<TodPreset>& pool);

/// s = global_seed * 1000003 + path_index * 7919 + 11, wrapping mod 2^64.
std::uint64_t weather_seed(std::uint64_t global_seed, std::uint64_t path_index);

enum class WeatherMode { kOff, kFixed, kRandomPerPath };
WeatherMode parse_weather_mode(std::string_view name);
std::string_view weather_mode_name(WeatherMode m);

struct WeatherSelection {
  WeatherMode mode = WeatherMode::kOff;
  WeatherPreset weather;
  TodPreset tod;
  [[nodiscard]] nlohmann::json to_json() const;
};

struct WeatherRequest {
  WeatherMode mode = WeatherMode::kOff;
  std::optional<std::string> weather_name;
  std::optional<std::string> tod_name;
  /// Negative selects a non-deterministic draw.
  std::int64_t global_seed = 0;
};

/// nullopt for mode off. Fixed mode needs both names (ConfigError if missing
/// or unknown). Random mode draws the weather, then the time of day, from one
/// SplitMix64 stream seeded with weather_seed.
std::optional<WeatherSelection> resolve_weather(const WeatherRequest& req, std::uint64_t path_index,
                                                const std::vector<WeatherPreset>& weather_pool,
                                                const std::vector<TodPreset>& tod_pool);

/// One FOV level per trajectory, uniform over kZoomLevelsDeg, from a stream
/// separate from the weather draw.
double draw_trajectory_fov(std::uint64_t global_seed, std::uint64_t path_index);

}  // namespace cosplan
