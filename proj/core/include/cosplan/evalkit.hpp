// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "cosplan/trajectory.hpp"

namespace cosplan {

struct MetricsReport {
  double path_length = 0.0;          ///< m
  double avg_target_distance = 0.0;  ///< m
  double avg_visibility = 0.0;
  double blocked_fraction = 0.0;  ///< share of frames with visibility < 1
  double accel_rms = 0.0;         ///< m/s^2
  double jerk_rms = 0.0;          ///< m/s^3
  double collision_fraction = 0.0;
  double min_signed_clearance = 0.0;  ///< m
  double planning_time_ms = 0.0;
  bool jerk_undefined = false;  ///< fewer than 4 waypoints

  [[nodiscard]] nlohmann::json to_json() const;
  static MetricsReport from_json(const nlohmann::json& doc);
};

/// Finite differences over the trajectory's dt. Visibility is recomputed
/// with `vis` rather than trusted from the trajectory.
MetricsReport trajectory_metrics(const DroneTrajectory& traj, const PedTrajectory& ped, const BoxMap& map,
                                 const VisibilityConfig& vis = {});

struct QualityThresholds {
  double accel_max = 5.0;   ///< m/s^2
  double jerk_max = 10.0;   ///< m/s^3
  double vis_prefilter = 0.40;
  double smoothness_review = 0.5;
};

/// exp(-(a / accel_max + j / jerk_max) / 2).
double smoothness_score(double accel_rms, double jerk_rms, const QualityThresholds& t = {});

/// (1 - collision_fraction) * clamp(min_clearance / 5, 0, 1).
double safety_score(double collision_fraction, double min_clearance);

/// Relative difference (a - b) / b.
double relative_delta(double a, double b);

struct ScenarioMetrics {
  std::string scenario_id;
  MetricsReport metrics;
  bool failed = false;
};

struct PlannerBatch {
  std::string planner;
  std::vector<ScenarioMetrics> scenarios;

  /// Mean over non-failed scenarios.
  [[nodiscard]] MetricsReport mean() const;
};

struct FourAxisScore {
  double visibility = 0.0;
  double path_efficiency = 0.0;
  double smoothness = 0.0;
  double safety = 0.0;
  double mean = 0.0;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Path efficiency divides the shortest planner mean path length by each
/// planner's; smoothness and safety apply the score formulas to batch means.
/// Throws ValidationError on an empty batch list or an empty planner batch.
std::map<std::string, FourAxisScore> four_axis_scores(const std::vector<PlannerBatch>& batches);
std::string four_axis_csv(const std::map<std::string, FourAxisScore>& scores);

/// Per-column min-max normalization across planners (best = 1), combined
/// with `weights` keyed by column name. Missing weights default to 1.
std::map<std::string, double> weighted_scores(const std::vector<PlannerBatch>& batches,
                                              const std::map<std::string, double>& weights = {});

struct MetricDelta {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double delta = 0.0;
  double relative = 0.0;  ///< (a - b) / b, 0 when b == 0
};

struct Comparison {
  std::string planner_a, planner_b;
  std::size_t scenarios = 0;
  std::map<std::string, MetricDelta> deltas;
  std::map<std::string, std::size_t> wins;  ///< scenario counts where a beats b

  [[nodiscard]] double win_rate(const std::string& key) const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Both batches must cover the same scenario ids (ValidationError otherwise).
Comparison compare_planners(const PlannerBatch& a, const PlannerBatch& b);

enum class FunnelOutcome { kPlannerFailure, kRejectedVisibility, kRejectedSmoothness, kFlaggedReview, kPassed };
std::string_view funnel_outcome_name(FunnelOutcome o);

struct FunnelReport {
  std::vector<std::pair<std::string, FunnelOutcome>> decisions;
  std::map<FunnelOutcome, std::size_t> counts;

  [[nodiscard]] std::size_t count(FunnelOutcome o) const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Precedence: planner failure, visibility prefilter, smoothness envelope,
/// review flag (S below threshold), pass. Every item lands in exactly one
/// bucket.
FunnelReport quality_filter(const std::vector<ScenarioMetrics>& items, const QualityThresholds& t = {});

struct DepthQuantReport {
  int bits = 0;
  std::size_t unique_values = 0;
  double step_cm = 0.0;
  double max_err_cm = 0.0;
  double mean_err_cm = 0.0;
  double rmse_cm = 0.0;
  double psnr_db = 0.0;  ///< reference amplitude = valid range width
  double storage_kb = 0.0;
  std::size_t valid_pixels = 0;
  std::size_t nonfinite_pixels = 0;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Linear round-to-nearest quantization of `depth` (meters) over [lo, hi]
/// to 2^bits levels; bits == 32 casts to single precision instead.
/// bits must be one of 8, 10, 12, 16, 32.
DepthQuantReport depth_quantization_report(const std::vector<double>& depth, int width, int height, double lo,
                                           double hi, int bits);

/// Row-major ramp of width*height values evenly spaced over [lo, hi].
std::vector<double> make_depth_ramp(int width, int height, double lo, double hi);

std::string depth_quant_csv(const std::vector<DepthQuantReport>& reports);

}  // namespace cosplan
