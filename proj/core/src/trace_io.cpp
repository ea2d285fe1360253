// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/trace_io.hpp"

#include "cosplan/errors.hpp"
#include "cosplan/io.hpp"

namespace cosplan {

nlohmann::json drone_trajectory_to_json(const DroneTrajectory& traj) {
  nlohmann::json wps = nlohmann::json::array();
  for (const auto& w : traj.waypoints) wps.push_back({{"t", w.t}, {"x", w.p.x()}, {"y", w.p.y()}, {"z", w.p.z()}});
  nlohmann::json doc = {{"path_id", traj.path_id},
                        {"planner", traj.planner},
                        {"failed", traj.failed},
                        {"config", traj.config},
                        {"waypoints", wps},
                        {"visibility", traj.visibility},
                        {"diagnostics", traj.diagnostics}};
  if (traj.failed) doc["failure"] = traj.failure;
  return doc;
}

DroneTrajectory drone_trajectory_from_json(const nlohmann::json& doc) {
  try {
    DroneTrajectory t;
    t.path_id = doc.at("path_id").get<std::string>();
    t.planner = doc.at("planner").get<std::string>();
    t.failed = doc.value("failed", false);
    t.failure = doc.value("failure", std::string());
    t.config = doc.value("config", nlohmann::json::object());
    t.diagnostics = doc.value("diagnostics", nlohmann::json::object());
    for (const auto& w : doc.at("waypoints"))
      t.waypoints.push_back(
          {w.at("t").get<double>(), Vec3(w.at("x").get<double>(), w.at("y").get<double>(), w.at("z").get<double>())});
    t.visibility = doc.value("visibility", std::vector<double>{});
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed drone trace: ") + e.what());
  }
}

nlohmann::json traces_to_json(const std::vector<DroneTrajectory>& traces) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : traces) arr.push_back(drone_trajectory_to_json(t));
  return {{"traces", arr}};
}

std::vector<DroneTrajectory> load_traces_file(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  if (!doc.contains("traces") || !doc["traces"].is_array())
    throw ParseError(path.string() + ": expected a \"traces\" array");
  std::vector<DroneTrajectory> out;
  for (const auto& t : doc["traces"]) out.push_back(drone_trajectory_from_json(t));
  return out;
}

nlohmann::json planning_times_to_json(const std::vector<DroneTrajectory>& traces) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& t : traces) doc[t.path_id + "/" + t.planner] = t.planning_ms;
  return doc;
}

}  // namespace cosplan
