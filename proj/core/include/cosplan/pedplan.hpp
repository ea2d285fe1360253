// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <utility>
#include <vector>

#include "cosplan/occupancy.hpp"

namespace cosplan {

struct SpeedModel {
  double v_cruise = 1.2;
  double alpha = 5.0;
  double beta = 0.15;
  double v_min = 0.0;
  double v_max = 1.6;
  double eps_kappa = 1e-6;
  /// Floor for the mean speed of a segment when converting to durations.
  double v_floor = 0.05;

  void validate() const;
};

struct PedWaypoint {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  double v = 0.0;
};

/// Uniformly sampled pedestrian trajectory; waypoint k sits at t = k * dt.
struct PedTrajectory {
  std::string id;
  double dt = 0.5;
  Cell start;
  Cell goal;
  std::vector<Cell> cells;
  std::vector<PedWaypoint> waypoints;
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t size() const { return waypoints.size(); }
  [[nodiscard]] bool empty() const { return waypoints.empty(); }
  [[nodiscard]] const Vec3& position(std::size_t i) const { return waypoints[i].p; }
};

/// Builds a trajectory directly from positions (timestamps k * dt, speeds from
/// finite differences). Useful for fixtures and tests.
PedTrajectory make_ped_trajectory(const std::vector<Vec3>& positions, double dt, std::string id = "fixture");

/// Uniform start over retained free cells, then a uniform goal among cells of
/// the same component whose center distance lies in [d_min, d_max]. Each of
/// `retries` rounds redraws both endpoints. Throws SamplingError.
std::pair<Cell, Cell> sample_endpoints(const OccupancyGrid& grid, double d_min, double d_max, std::uint64_t seed,
                                       int retries = 5);

struct GridPath {
  std::vector<Cell> cells;
  double cost = 0.0;
};

/// 8-connected A* with unit/sqrt(2) steps, octile heuristic, no corner
/// cutting past occupied cells. Throws PlanningError when unreachable.
GridPath plan_astar_2d(const OccupancyGrid& grid, const Cell& start, const Cell& goal);

/// 2|a x b| / (|a||b||c|) with the guard described in SpeedModel; 0 when the
/// unguarded denominator falls below eps.
double menger_curvature(const Vec3& prev, const Vec3& p, const Vec3& next, double eps = 1e-6);

/// v_cruise / (1 + alpha kappa) * (1 + beta u), clipped.
double curvature_speed(double kappa, double noise, const SpeedModel& model);

/// Converts a cell path into a timestamped trajectory with curvature-driven
/// speed and per-waypoint seeded noise, then resamples at uniform dt.
/// The number of samples is round(T / dt) + 1; samples past the end clamp to
/// the goal.
PedTrajectory resample_variable_speed(const std::vector<Cell>& path, const GridSpec& spec, const SpeedModel& model,
                                      double dt, std::uint64_t seed);

struct PedPlanConfig {
  GridSpec grid;          ///< width/height 0 means derive from map bounds
  double grid_margin = 2.0;
  std::size_t min_component_cells = 4000;
  double d_min = 50.0;
  double d_max = 100.0;
  int retries = 5;
  double dt = 0.5;
  SpeedModel speed;
  std::size_t max_cells = kDefaultCellBudget;
};

nlohmann::json pedplan_config_to_json(const PedPlanConfig& cfg);
PedPlanConfig pedplan_config_from_json(const nlohmann::json& doc, PedPlanConfig base = {});

struct PedPlanReport {
  int grid_width = 0;
  int grid_height = 0;
  std::size_t raw_cells = 0;
  std::size_t inflated_cells = 0;
  std::size_t components = 0;
  std::size_t paths_planned = 0;
  std::size_t sampling_failures = 0;
  double grid_ms = 0.0;
  double regions_ms = 0.0;
  double sampling_ms = 0.0;
  double astar_ms = 0.0;
  double resample_ms = 0.0;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Grid covering the map footprint, and optionally the ROI, with margin.
GridSpec derive_grid_spec(const BoxMap& map, const RoiPolygon* roi, const PedPlanConfig& cfg);

/// Plans `n` scenarios with ids "path_000".."path_{n-1}". Scenario i draws
/// endpoints from derive_seed(seed, i); failed scenarios are skipped and
/// counted.
std::vector<PedTrajectory> plan_pedestrians(const OccupancyGrid& grid, int n, std::uint64_t seed,
                                            const PedPlanConfig& cfg, PedPlanReport* report = nullptr);

struct PedPlanRun {
  OccupancyGrid grid;
  std::vector<PedTrajectory> paths;
  PedPlanReport report;
};

/// Grid derivation, occupancy, free-space regions and plan_pedestrians in
/// one call, with every report field filled.
PedPlanRun plan_pedestrians_on_map(const BoxMap& map, const RoiPolygon* roi, int n, std::uint64_t seed,
                                   const PedPlanConfig& cfg);

nlohmann::json ped_trajectory_to_json(const PedTrajectory& traj, const GridSpec& spec);
PedTrajectory ped_trajectory_from_json(const nlohmann::json& doc);

/// `path.json`: {"dt", "grid", "paths": [...]}.
nlohmann::json paths_to_json(const std::vector<PedTrajectory>& paths, const GridSpec& spec);
std::vector<PedTrajectory> load_paths_file(const std::filesystem::path& path);

}  // namespace cosplan
