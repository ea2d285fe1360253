// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// cosplan: command-line front end for the planning toolkit.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cosplan/augment.hpp"
#include "cosplan/editor.hpp"
#include "cosplan/errors.hpp"
#include "cosplan/evalkit.hpp"
#include "cosplan/io.hpp"
#include "cosplan/occupancy.hpp"
#include "cosplan/pipeline.hpp"
#include "cosplan/polygon.hpp"
#include "cosplan/synthetic.hpp"
#include "cosplan/trace_io.hpp"

namespace fs = std::filesystem;
using namespace cosplan;

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

fs::path self_executable(const char* argv0) {
  std::error_code ec;
  auto p = fs::read_symlink("/proc/self/exe", ec);
  return ec ? fs::absolute(argv0) : p;
}

PlannerSettings load_planner_settings(const std::string& path) {
  if (path.empty()) return {};
  return planner_settings_from_json(read_json_file(path));
}

PlannerBatch batch_from_files(const fs::path& traces_path, const fs::path& paths_path, const BoxMap& map) {
  const auto traces = load_traces_file(traces_path);
  const auto peds = load_paths_file(paths_path);
  if (traces.size() != peds.size()) throw ValidationError(traces_path.string() + ": scenario count differs from paths");
  PlannerBatch b;
  b.planner = traces.empty() ? "" : traces.front().planner;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    ScenarioMetrics sm{traces[i].path_id, {}, traces[i].failed};
    if (!sm.failed) sm.metrics = trajectory_metrics(traces[i], peds[i], map);
    b.scenarios.push_back(sm);
  }
  return b;
}

// Timing lines go to stderr so stdout stays machine-readable.
void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cosplan: drone cinematography planning toolkit"};
  app.require_subcommand(1);

  // simplify
  auto* simplify = app.add_subcommand("simplify", "Simplify an exported 3D box map");
  std::string s_in, s_out, s_report, s_passes, s_merge, s_tree = "fixed";
  simplify->add_option("--in", s_in, "boxes_3d.json")->required();
  simplify->add_option("--out", s_out, "Simplified box map")->required();
  simplify->add_option("--report", s_report, "Per-pass report JSON");
  simplify->add_option("--passes", s_passes, "Comma-separated pass order");
  simplify->add_option("--merge-tol", s_merge, "e.g. v=2.0,b=5.0");
  simplify->add_option("--tree-strategy", s_tree, "fixed|adaptive");

  // pedplan
  auto* pedplan = app.add_subcommand("pedplan", "Plan pedestrian trajectories on the ground grid");
  std::string p_map, p_roi, p_out = ".";
  int p_n = 20;
  std::uint64_t p_seed = 0;
  double p_res = 0.5;
  pedplan->add_option("--map", p_map, "Box map")->required();
  pedplan->add_option("--roi", p_roi, "roi_polygon.json");
  pedplan->add_option("--n", p_n, "Scenario count");
  pedplan->add_option("--seed", p_seed, "Sampling seed");
  pedplan->add_option("--resolution", p_res, "Grid cell size in metres");
  pedplan->add_option("--out-dir", p_out, "Writes path.json, grid_mask.png, grid_meta.json");

  // plan
  auto* plan = app.add_subcommand("plan", "Plan drone trajectories for every pedestrian path");
  std::string pl_paths, pl_map, pl_planner = "muco", pl_config, pl_out = "drone_trace.json", pl_timings;
  int pl_workers = 1;
  std::vector<std::size_t> pl_inject;
  plan->add_option("--paths", pl_paths, "path.json")->required();
  plan->add_option("--map", pl_map, "Box map")->required();
  plan->add_option("--planner", pl_planner, "muco|tastar|tastar_smooth|follower|baseline:<kind>");
  plan->add_option("--config", pl_config, "Planner settings JSON");
  plan->add_option("--workers", pl_workers, "Worker threads")->check(CLI::PositiveNumber);
  plan->add_option("--inject-failure", pl_inject, "Scenario indices to record as failures");
  plan->add_option("--out", pl_out, "drone_trace.json");
  plan->add_option("--timings", pl_timings, "plan_timings.json");

  // eval
  auto* eval = app.add_subcommand("eval", "Metrics, four-axis scores and the quality funnel");
  std::string e_paths, e_map, e_out;
  std::vector<std::string> e_traces;
  eval->add_option("--paths", e_paths, "path.json")->required();
  eval->add_option("--map", e_map, "Box map")->required();
  eval->add_option("--traces", e_traces, "One drone_trace.json per planner")->required();
  eval->add_option("--out", e_out, "Output JSON (stdout when omitted)");

  // compare
  auto* compare = app.add_subcommand("compare", "Per-scenario win rate of planner A over B");
  std::string c_paths, c_map, c_a, c_b;
  compare->add_option("--paths", c_paths, "path.json")->required();
  compare->add_option("--map", c_map, "Box map")->required();
  compare->add_option("--a", c_a, "Traces of planner A")->required();
  compare->add_option("--b", c_b, "Traces of planner B")->required();

  // depth-quant
  auto* dq = app.add_subcommand("depth-quant", "Depth storage precision table");
  int dq_w = 1280, dq_h = 720;
  double dq_lo = 0.0, dq_hi = 1000.0;
  std::string dq_bits = "8,16,32";
  dq->add_option("--width", dq_w);
  dq->add_option("--height", dq_h);
  dq->add_option("--min-depth", dq_lo);
  dq->add_option("--max-depth", dq_hi);
  dq->add_option("--bits", dq_bits);

  // weather
  auto* weather = app.add_subcommand("weather", "Resolve weather and time-of-day per path");
  std::string w_mode = "random_per_path", w_name, w_tod, w_pool, w_tod_pool;
  std::int64_t w_seed = 0;
  int w_paths = 1;
  weather->add_option("--mode", w_mode, "off|fixed|random_per_path");
  weather->add_option("--weather", w_name);
  weather->add_option("--tod", w_tod);
  weather->add_option("--seed", w_seed, "Global seed; negative draws a fresh one");
  weather->add_option("--paths", w_paths);
  weather->add_option("--weather-pool", w_pool);
  weather->add_option("--tod-pool", w_tod_pool);

  // camera
  auto* camera = app.add_subcommand("camera", "FOV / focal length conversion");
  std::optional<double> cam_fov, cam_focal;
  int cam_w = 1280, cam_h = 720;
  camera->add_option("--fov", cam_fov, "Horizontal FOV in degrees");
  camera->add_option("--focal", cam_focal, "Focal length in pixels");
  camera->add_option("--width", cam_w);
  camera->add_option("--height", cam_h);

  // run
  auto* run = app.add_subcommand("run", "End-to-end run under the stage watchdog");
  std::string r_map, r_roi, r_planner = "muco", r_out = "runs", r_id, r_config;
  int r_n = 20, r_workers = 1, r_restarts = 2;
  std::uint64_t r_seed = 0;
  double r_hb = 2.0;
  std::vector<std::size_t> r_inject;
  run->add_option("--map", r_map, "boxes_3d.json")->required();
  run->add_option("--roi", r_roi, "roi_polygon.json");
  run->add_option("--n", r_n, "Scenario count");
  run->add_option("--seed", r_seed);
  run->add_option("--planner", r_planner);
  run->add_option("--out", r_out, "Run root directory");
  run->add_option("--run-id", r_id, "Reuse to resume a run");
  run->add_option("--config", r_config, "Partial pipeline config JSON");
  run->add_option("--workers", r_workers)->check(CLI::PositiveNumber);
  run->add_option("--inject-failure", r_inject);
  run->add_option("--heartbeat-interval", r_hb);
  run->add_option("--max-restarts", r_restarts);

  // synth-map
  auto* synth = app.add_subcommand("synth-map", "Write a synthetic block-grid town as boxes_3d.json");
  SyntheticCityConfig sy;
  std::string sy_out;
  synth->add_option("--out", sy_out, "Output box map")->required();
  synth->add_option("--blocks-x", sy.blocks_x);
  synth->add_option("--blocks-y", sy.blocks_y);
  synth->add_option("--block-size", sy.block_size);
  synth->add_option("--street-width", sy.street_width);
  synth->add_option("--trees-per-block", sy.trees_per_block);
  synth->add_option("--seed", sy.seed);

  // stage (watchdog child)
  auto* stage = app.add_subcommand("stage", "Run one pipeline stage in a prepared run directory");
  stage->group("");  // internal
  std::string st_name, st_dir, st_hb;
  double st_interval = 1.0;
  stage->add_option("name", st_name)->required();
  stage->add_option("--run-dir", st_dir)->required();
  stage->add_option("--heartbeat", st_hb);
  stage->add_option("--heartbeat-interval", st_interval);

  // edit-roi
  auto* edit = app.add_subcommand("edit-roi", "Serve the grid backdrop and receive an ROI polygon");
  std::string ed_grid, ed_meta, ed_out, ed_static, ed_host = "127.0.0.1";
  int ed_port = 0;
  edit->add_option("--grid", ed_grid, "grid_mask.png")->required();
  edit->add_option("--meta", ed_meta, "grid_meta.json")->required();
  edit->add_option("--out", ed_out, "roi_polygon.json")->required();
  edit->add_option("--port", ed_port, "0 picks a free port");
  edit->add_option("--host", ed_host);
  edit->add_option("--static", ed_static, "Editor app directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simplify) {
      SimplifyConfig cfg;
      if (!s_merge.empty()) cfg.merge_tolerance = parse_merge_tolerances(s_merge);
      cfg.tree_strategy = parse_tree_strategy(s_tree);
      const auto passes = s_passes.empty() ? default_pass_order() : split_csv(s_passes);
      auto [out, report] = simplify_pipeline(load_box_map_file(s_in), cfg, passes);
      write_box_map_file(out, s_out);
      if (!s_report.empty()) write_json_atomic(s_report, report.to_json());
      std::cerr << "simplified to " << out.size() << " boxes\n";
    } else if (*pedplan) {
      PedPlanConfig cfg;
      cfg.grid.resolution = p_res;
      std::optional<RoiPolygon> roi;
      if (!p_roi.empty()) roi = load_roi_file(p_roi);
      const auto run = plan_pedestrians_on_map(load_box_map_file(p_map), roi ? &*roi : nullptr, p_n, p_seed, cfg);
      fs::create_directories(p_out);
      write_json_atomic(fs::path(p_out) / "path.json", paths_to_json(run.paths, run.grid.spec));
      write_grid_mask_png(run.grid, fs::path(p_out) / "grid_mask.png");
      write_json_atomic(fs::path(p_out) / "grid_meta.json", grid_spec_to_json(run.grid.spec));
      print_json(run.report.to_json());
    } else if (*plan) {
      const auto settings = load_planner_settings(pl_config);
      const auto traces = plan_batch(pl_planner, load_paths_file(pl_paths), load_box_map_file(pl_map), settings,
                                     pl_workers, {pl_inject.begin(), pl_inject.end()});
      write_json_atomic(pl_out, traces_to_json(traces));
      if (!pl_timings.empty()) write_json_atomic(pl_timings, planning_times_to_json(traces));
      std::size_t failed = 0;
      for (const auto& t : traces) failed += t.failed ? 1 : 0;
      std::cerr << traces.size() << " trajectories, " << failed << " failed\n";
    } else if (*eval) {
      const BoxMap map = load_box_map_file(e_map);
      std::vector<PlannerBatch> batches;
      nlohmann::json out = {{"planners", nlohmann::json::object()}};
      for (const auto& t : e_traces) {
        auto b = batch_from_files(t, e_paths, map);
        out["planners"][b.planner] = {{"mean", b.mean().to_json()}, {"funnel", quality_filter(b.scenarios).to_json()}};
        batches.push_back(std::move(b));
      }
      nlohmann::json axes = nlohmann::json::object();
      for (const auto& [name, s] : four_axis_scores(batches)) axes[name] = s.to_json();
      out["four_axis"] = axes;
      out["weighted"] = weighted_scores(batches);
      if (e_out.empty()) print_json(out);
      else write_json_atomic(e_out, out);
    } else if (*compare) {
      const BoxMap map = load_box_map_file(c_map);
      print_json(compare_planners(batch_from_files(c_a, c_paths, map), batch_from_files(c_b, c_paths, map)).to_json());
    } else if (*dq) {
      const auto depth = make_depth_ramp(dq_w, dq_h, dq_lo, dq_hi);
      std::vector<DepthQuantReport> reports;
      for (const auto& b : split_csv(dq_bits))
        reports.push_back(depth_quantization_report(depth, dq_w, dq_h, dq_lo, dq_hi, std::stoi(b)));
      std::cout << depth_quant_csv(reports);
    } else if (*weather) {
      const auto wp = w_pool.empty() ? builtin_weather_presets() : load_weather_pool(w_pool);
      const auto tp = w_tod_pool.empty() ? builtin_tod_presets() : load_tod_pool(w_tod_pool);
      WeatherRequest req;
      req.mode = parse_weather_mode(w_mode);
      if (!w_name.empty()) req.weather_name = w_name;
      if (!w_tod.empty()) req.tod_name = w_tod;
      req.global_seed = w_seed;
      nlohmann::json arr = nlohmann::json::array();
      for (int i = 0; i < w_paths; ++i) {
        const auto sel = resolve_weather(req, static_cast<std::uint64_t>(i), wp, tp);
        arr.push_back(sel ? sel->to_json() : nlohmann::json(nullptr));
      }
      print_json(arr);
    } else if (*camera) {
      if (cam_fov.has_value() == cam_focal.has_value()) throw ConfigError("give exactly one of --fov and --focal");
      CameraIntrinsics cam;
      cam.width = cam_w;
      cam.height = cam_h;
      cam.fov_deg = cam_fov ? *cam_fov : focal_to_fov(*cam_focal, cam_w);
      print_json(cam.to_json());
    } else if (*run) {
      nlohmann::json doc = pipeline_config_to_json(PipelineConfig{});
      if (!r_config.empty()) doc.merge_patch(read_json_file(r_config));
      doc["map"] = r_map;
      doc["roi"] = r_roi.empty() ? nlohmann::json(nullptr) : nlohmann::json(r_roi);
      doc["scenarios"] = r_n;
      doc["seed"] = r_seed;
      doc["planner"] = r_planner;
      doc["workers"] = r_workers;
      doc["inject_failure"] = std::set<std::size_t>(r_inject.begin(), r_inject.end());
      RunOptions opts;
      opts.out_root = r_out;
      opts.run_id = r_id;
      opts.executable = self_executable(argv[0]);
      opts.policy.heartbeat_interval = r_hb;
      opts.policy.max_restarts = r_restarts;
      const auto result = run_pipeline(pipeline_config_from_json(doc), opts);
      for (const auto& s : result.stages)
        std::cerr << s.stage << ": " << stage_status_name(s.status) << " (attempts " << s.attempts << ")\n";
      std::cout << result.run_dir.string() << "\n";
      return result.succeeded() ? 0 : 3;
    } else if (*synth) {
      const BoxMap map = synthetic_city(sy);
      write_box_map_file(map, sy_out);
      print_json(category_report(map));
    } else if (*stage) {
      std::optional<HeartbeatWriter> hb;
      if (!st_hb.empty()) hb.emplace(st_hb, st_interval);
      execute_stage(st_name, st_dir);
    } else if (*edit) {
      EditorSessionConfig cfg{ed_grid, ed_meta, ed_out, ed_host, ed_port, std::nullopt};
      if (!ed_static.empty()) cfg.static_dir = ed_static;
      auto session = serve_editor_session(cfg);
      std::cout << "http://" << ed_host << ":" << session->port() << "/\n" << std::flush;
      session->wait();
      std::cerr << session->saves() << " polygon(s) saved\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
