// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "cosplan/trajectory.hpp"

namespace cosplan {

/// One trace entry: path id, planner tag, config snapshot, waypoints as
/// {"t","x","y","z"}, per-frame visibility and diagnostics. Planning wall
/// time is left out so traces stay byte-reproducible.
nlohmann::json drone_trajectory_to_json(const DroneTrajectory& traj);
DroneTrajectory drone_trajectory_from_json(const nlohmann::json& doc);

/// {"traces": [...]} in input order.
nlohmann::json traces_to_json(const std::vector<DroneTrajectory>& traces);
std::vector<DroneTrajectory> load_traces_file(const std::filesystem::path& path);

/// Planning times keyed by "<path_id>/<planner>", stored apart from traces.
nlohmann::json planning_times_to_json(const std::vector<DroneTrajectory>& traces);

}  // namespace cosplan
