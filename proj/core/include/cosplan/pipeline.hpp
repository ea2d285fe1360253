// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cosplan/baselines.hpp"
#include "cosplan/evalkit.hpp"
#include "cosplan/muco.hpp"
#include "cosplan/pedplan.hpp"
#include "cosplan/simplify.hpp"
#include "cosplan/smoothing.hpp"
#include "cosplan/tastar.hpp"
#include "cosplan/watchdog.hpp"

namespace cosplan {

struct PlannerSettings {
  SharedPlannerConfig shared;
  TaStarConfig tastar;
  SmoothConfig smooth;
  MuCoConfig muco;
  BaselineConfig baseline;
};

nlohmann::json planner_settings_to_json(const PlannerSettings& s);
PlannerSettings planner_settings_from_json(const nlohmann::json& doc, PlannerSettings base = {});

/// "muco", "tastar", "tastar_smooth", "follower" and "baseline:<kind>".
std::vector<std::string> planner_names();
/// Throws ConfigError for an unknown planner name.
void validate_planner_name(const std::string& name);

/// Runs one planner on one scenario. Planner exceptions become a failed
/// trajectory carrying the message; planning_ms is always filled.
DroneTrajectory plan_scenario(const std::string& planner, const PedTrajectory& ped, const BoxMap& map,
                              const PlannerSettings& settings);

/// Plans every scenario on a pool of `workers` threads. Output order equals
/// input order. Indices in `inject_failure` are recorded as failures
/// without planning.
std::vector<DroneTrajectory> plan_batch(const std::string& planner, const std::vector<PedTrajectory>& peds,
                                        const BoxMap& map, const PlannerSettings& settings, int workers,
                                        const std::set<std::size_t>& inject_failure = {});

/// Everything a run needs; serialized as the run's config snapshot.
struct PipelineConfig {
  std::filesystem::path map_path;
  std::optional<std::filesystem::path> roi_path;
  int scenarios = 20;
  std::uint64_t seed = 0;
  std::string planner = "muco";
  int workers = 1;
  std::set<std::size_t> inject_failure;
  SimplifyConfig simplify;
  std::vector<std::string> simplify_passes = default_pass_order();
  PedPlanConfig pedplan;
  PlannerSettings planners;
  QualityThresholds quality;

  void validate() const;
};

nlohmann::json pipeline_config_to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_json(const nlohmann::json& doc);

/// Stage names in execution order.
const std::vector<std::string>& pipeline_stages();

/// Artifact file names (relative to the run directory) a stage must leave.
const std::vector<std::string>& stage_artifacts(const std::string& stage);

/// Executes one stage in-process against a prepared run directory (the
/// body of each watchdog child). Reads run_dir/config.json.
void execute_stage(const std::string& stage, const std::filesystem::path& run_dir);

/// Stall timeouts per stage; unknown stages must be configured explicitly.
struct StageTimeouts {
  double simplify = 60.0;
  double pedplan = 120.0;
  double plan = 120.0;
  double eval = 60.0;
  [[nodiscard]] double for_stage(const std::string& stage) const;
};

struct RunOptions {
  std::filesystem::path out_root = "runs";
  /// Reusing an id resumes that run. Empty means a UTC timestamp.
  std::string run_id;
  /// Stage executable; invoked as `<exe> stage <name> --run-dir D --heartbeat H`.
  std::filesystem::path executable;
  WatchdogPolicy policy{2.0, 120.0, 2, true, true};
  StageTimeouts timeouts;
};

struct PipelineRun {
  std::string run_id;
  std::filesystem::path run_dir;
  std::vector<StageRecord> stages;
  nlohmann::json config;
  std::vector<std::string> artifacts;
  [[nodiscard]] bool succeeded() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// FNV-1a over the bytes; used to key resumable stages to a config snapshot.
std::uint64_t fnv1a64(std::string_view bytes);

/// simplify -> pedplan -> plan -> eval, each under run_stage. A stage is
/// skipped when the log holds a finish event with the same config checksum
/// and all of its artifacts exist. A failed stage marks every later stage
/// skipped. Writes run.json.
PipelineRun run_pipeline(const PipelineConfig& cfg, const RunOptions& opts);

}  // namespace cosplan
