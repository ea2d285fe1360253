// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "cosplan/trajectory.hpp"

namespace cosplan {

struct MuCoWeights {
  double tracking = 2.0;
  double smoothness = 4.0;
  double jerk = 3.0;
  double safety = 2.0;
  double visibility = 2.0;
  double view_angle = 1.0;
  double path = 2.0;
};

struct MuCoConfig {
  double fd_epsilon = 0.5;
  double learning_rate = 0.05;
  double step_cap = 0.5;
  int max_iters = 1500;
  double convergence_dL = 1e-5;
  double d_opt = 28.0;
  double d_influence = 8.0;
  MuCoWeights w;
  double path_scale = 0.1;
  double alt_below = 50.0;
  double alt_above_pref = 20.0;
  double alt_oscillation = 8.0;
  double pitch_band_lo_deg = 30.0;
  double pitch_band_hi_deg = 60.0;
  double pitch_target_deg = 45.0;
  double pitch_band_coeff = 10.0;
  int heading_window = 5;
  int pushout_iters = 10;
  double circling_vis_threshold = 0.3;
  int circling_run_length = 20;
  /// Step-size search floor; below it the optimizer reports convergence.
  double min_learning_rate = 1e-7;
  VisibilityConfig visibility;

  void validate() const;
};

nlohmann::json muco_config_to_json(const MuCoConfig& cfg);
MuCoConfig muco_config_from_json(const nlohmann::json& doc, MuCoConfig base = {});

struct MuCoLoss {
  double tracking = 0.0;
  double smoothness = 0.0;
  double jerk = 0.0;
  double safety = 0.0;
  double visibility = 0.0;
  double view_angle = 0.0;
  double path = 0.0;
  double altitude = 0.0;
  double pitch_band = 0.0;

  /// Sum of every weighted term.
  [[nodiscard]] double total() const {
    return tracking + smoothness + jerk + safety + visibility + view_angle + path + altitude + pitch_band;
  }
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Weighted loss over all frames. Visibility and view-angle contributions of
/// frames where `mask` is true are reported in the breakdown but left out of
/// `objective`, so they contribute no gradient.
struct MuCoEvaluation {
  MuCoLoss breakdown;
  double objective = 0.0;
};

MuCoEvaluation muco_loss(const std::vector<Vec3>& pts, const PedTrajectory& ped, const BoxMap& map,
                         const SharedPlannerConfig& shared, const MuCoConfig& cfg, const std::vector<bool>& mask);

/// Central-difference gradient of the objective; endpoints get zero rows.
/// Vertical probes are clipped to [z_min, z_max].
std::vector<Vec3> muco_gradient(const std::vector<Vec3>& pts, const PedTrajectory& ped, const BoxMap& map,
                                const SharedPlannerConfig& shared, const MuCoConfig& cfg,
                                const std::vector<bool>& mask);

/// Central-difference gradient of the weighted smoothness term alone, and
/// its closed form. Used to cross-check the finite-difference machinery.
std::vector<Vec3> smoothness_gradient_fd(const std::vector<Vec3>& pts, double weight, double eps);
std::vector<Vec3> smoothness_gradient_analytic(const std::vector<Vec3>& pts, double weight);

/// Clamps altitude and step length, pushes out of obstacles along the
/// nearest-surface normal, and never returns a point with negative clearance.
Vec3 project_feasible(const Vec3& p, const std::optional<Vec3>& prev, const BoxMap& map,
                      const SharedPlannerConfig& shared, const MuCoConfig& cfg);

/// True on maximal runs of at least run_length frames with V < threshold.
std::vector<bool> detect_low_vis_runs(const std::vector<double>& vis, const MuCoConfig& cfg);

/// Throws PlanningError when the initialization cannot reach relaxed
/// clearance.
DroneTrajectory plan_muco(const PedTrajectory& ped, const BoxMap& map, const SharedPlannerConfig& shared,
                          const MuCoConfig& cfg, const std::optional<DroneTrajectory>& init = std::nullopt);

}  // namespace cosplan
