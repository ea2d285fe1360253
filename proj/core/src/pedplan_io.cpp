// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include <nlohmann/json.hpp>

#include "cosplan/errors.hpp"
#include "cosplan/io.hpp"
#include "cosplan/pedplan.hpp"

namespace cosplan {

using nlohmann::json;

json PedPlanReport::to_json() const {
  return {{"grid", {{"width", grid_width}, {"height", grid_height}}},
          {"raw_occupied_cells", raw_cells},
          {"inflated_occupied_cells", inflated_cells},
          {"components", components},
          {"paths_planned", paths_planned},
          {"sampling_failures", sampling_failures},
          {"wall_ms",
           {{"occupancy_grid", grid_ms},
            {"free_space_regions", regions_ms},
            {"endpoint_sampling", sampling_ms},
            {"astar", astar_ms},
            {"variable_speed_resampling", resample_ms}}}};
}

json ped_trajectory_to_json(const PedTrajectory& traj, const GridSpec& spec) {
  json cells = json::array();
  for (const auto& c : traj.cells) cells.push_back({c.x, c.y});
  json samples = json::array();
  for (const auto& w : traj.waypoints)
    samples.push_back({{"t", w.t}, {"x", w.p.x()}, {"y", w.p.y()}, {"z", w.p.z()}, {"v", w.v}});
  const Vec2 s = spec.cell_center(traj.start);
  const Vec2 g = spec.cell_center(traj.goal);
  json out{{"id", traj.id},
           {"dt", traj.dt},
           {"start_cell", {traj.start.x, traj.start.y}},
           {"goal_cell", {traj.goal.x, traj.goal.y}},
           {"start_world", {s.x(), s.y(), spec.ground_z}},
           {"goal_world", {g.x(), g.y(), spec.ground_z}},
           {"cells", cells},
           {"trajectory", samples}};
  if (!traj.warnings.empty()) out["warnings"] = traj.warnings;
  return out;
}

PedTrajectory ped_trajectory_from_json(const json& doc) {
  try {
    PedTrajectory traj;
    traj.id = doc.at("id").get<std::string>();
    traj.dt = doc.at("dt").get<double>();
    if (doc.contains("start_cell")) traj.start = {doc["start_cell"].at(0).get<int>(), doc["start_cell"].at(1).get<int>()};
    if (doc.contains("goal_cell")) traj.goal = {doc["goal_cell"].at(0).get<int>(), doc["goal_cell"].at(1).get<int>()};
    if (doc.contains("cells"))
      for (const auto& c : doc["cells"]) traj.cells.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
    for (const auto& s : doc.at("trajectory")) {
      PedWaypoint w;
      w.t = s.at("t").get<double>();
      w.p = Vec3(s.at("x").get<double>(), s.at("y").get<double>(), s.at("z").get<double>());
      w.v = s.value("v", 0.0);
      if (!w.p.allFinite() || !std::isfinite(w.t)) throw ParseError("non-finite trajectory sample in " + traj.id);
      traj.waypoints.push_back(w);
    }
    if (doc.contains("warnings")) traj.warnings = doc["warnings"].get<std::vector<std::string>>();
    return traj;
  } catch (const json::exception& e) {
    throw ParseError(std::string("pedestrian path: ") + e.what());
  }
}

json paths_to_json(const std::vector<PedTrajectory>& paths, const GridSpec& spec) {
  json arr = json::array();
  for (const auto& p : paths) arr.push_back(ped_trajectory_to_json(p, spec));
  return {{"dt", paths.empty() ? 0.5 : paths.front().dt}, {"grid", grid_spec_to_json(spec)}, {"paths", arr}};
}

std::vector<PedTrajectory> load_paths_file(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  const json& arr = doc.is_array() ? doc : doc.at("paths");
  std::vector<PedTrajectory> out;
  for (const auto& p : arr) out.push_back(ped_trajectory_from_json(p));
  return out;
}

nlohmann::json pedplan_config_to_json(const PedPlanConfig& c) {
  return {{"grid", grid_spec_to_json(c.grid)},
          {"grid_margin", c.grid_margin},
          {"min_component_cells", c.min_component_cells},
          {"d_min", c.d_min},
          {"d_max", c.d_max},
          {"retries", c.retries},
          {"dt", c.dt},
          {"speed",
           {{"v_cruise", c.speed.v_cruise},
            {"alpha", c.speed.alpha},
            {"beta", c.speed.beta},
            {"v_min", c.speed.v_min},
            {"v_max", c.speed.v_max},
            {"eps_kappa", c.speed.eps_kappa},
            {"v_floor", c.speed.v_floor}}},
          {"max_cells", c.max_cells}};
}

PedPlanConfig pedplan_config_from_json(const nlohmann::json& doc, PedPlanConfig c) {
  try {
    // A zero-sized grid is a template; grid_spec_from_json would reject it.
    if (doc.contains("grid")) {
      const auto& g = doc["grid"];
      c.grid.resolution = g.value("resolution", c.grid.resolution);
      c.grid.ground_z = g.value("ground_z", c.grid.ground_z);
      c.grid.human_height = g.value("human_height", c.grid.human_height);
      c.grid.inflation_radius = g.value("inflation_radius", c.grid.inflation_radius);
      if (g.value("width", 0) > 0 && g.value("height", 0) > 0) c.grid = grid_spec_from_json(g);
    }
    c.grid_margin = doc.value("grid_margin", c.grid_margin);
    c.min_component_cells = doc.value("min_component_cells", c.min_component_cells);
    c.d_min = doc.value("d_min", c.d_min);
    c.d_max = doc.value("d_max", c.d_max);
    c.retries = doc.value("retries", c.retries);
    c.dt = doc.value("dt", c.dt);
    if (doc.contains("speed")) {
      const auto& s = doc["speed"];
      c.speed.v_cruise = s.value("v_cruise", c.speed.v_cruise);
      c.speed.alpha = s.value("alpha", c.speed.alpha);
      c.speed.beta = s.value("beta", c.speed.beta);
      c.speed.v_min = s.value("v_min", c.speed.v_min);
      c.speed.v_max = s.value("v_max", c.speed.v_max);
      c.speed.eps_kappa = s.value("eps_kappa", c.speed.eps_kappa);
      c.speed.v_floor = s.value("v_floor", c.speed.v_floor);
    }
    c.max_cells = doc.value("max_cells", c.max_cells);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("pedplan config: ") + e.what());
  }
  if (!(c.dt > 0.0) || !(c.d_min >= 0.0) || !(c.d_max >= c.d_min) || c.retries < 1)
    throw ConfigError("pedplan config: need dt > 0, 0 <= d_min <= d_max, retries >= 1");
  return c;
}

}  // namespace cosplan
