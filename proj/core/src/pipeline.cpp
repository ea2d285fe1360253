// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <thread>

#include "cosplan/errors.hpp"
#include "cosplan/io.hpp"
#include "cosplan/occupancy.hpp"
#include "cosplan/polygon.hpp"
#include "cosplan/trace_io.hpp"

namespace cosplan {

nlohmann::json planner_settings_to_json(const PlannerSettings& s) {
  return {{"shared", shared_config_to_json(s.shared)},
          {"tastar", tastar_config_to_json(s.tastar)},
          {"smooth", smooth_config_to_json(s.smooth)},
          {"muco", muco_config_to_json(s.muco)},
          {"baseline", baseline_config_to_json(s.baseline)}};
}

PlannerSettings planner_settings_from_json(const nlohmann::json& doc, PlannerSettings s) {
  if (!doc.is_object()) throw ConfigError("planner settings must be a JSON object");
  if (doc.contains("shared")) s.shared = shared_config_from_json(doc["shared"], s.shared);
  if (doc.contains("tastar")) s.tastar = tastar_config_from_json(doc["tastar"], s.tastar);
  if (doc.contains("smooth")) s.smooth = smooth_config_from_json(doc["smooth"], s.smooth);
  if (doc.contains("muco")) s.muco = muco_config_from_json(doc["muco"], s.muco);
  if (doc.contains("baseline")) s.baseline = baseline_config_from_json(doc["baseline"], s.baseline);
  return s;
}

std::vector<std::string> planner_names() {
  std::vector<std::string> out{"muco", "tastar", "tastar_smooth", "follower"};
  for (auto k : all_baseline_kinds()) out.push_back("baseline:" + std::string(baseline_name(k)));
  return out;
}

void validate_planner_name(const std::string& name) {
  const auto names = planner_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw ConfigError("unknown planner '" + name + "'");
}

DroneTrajectory plan_scenario(const std::string& planner, const PedTrajectory& ped, const BoxMap& map,
                              const PlannerSettings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  DroneTrajectory traj;
  try {
    if (planner == "muco") {
      traj = plan_muco(ped, map, s.shared, s.muco);
    } else if (planner == "tastar") {
      traj = plan_tastar(ped, map, s.shared, s.tastar);
    } else if (planner == "tastar_smooth") {
      traj = plan_tastar_smooth(ped, map, s.shared, s.tastar, s.smooth);
    } else if (planner == "follower") {
      traj = plan_follower(ped, map, s.shared);
    } else if (planner.rfind("baseline:", 0) == 0) {
      traj = plan_baseline(parse_baseline_kind(planner.substr(9)), ped, map, s.shared, s.baseline);
    } else {
      throw ConfigError("unknown planner '" + planner + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    traj = DroneTrajectory{};
    traj.path_id = ped.id;
    traj.planner = planner;
    traj.failed = true;
    traj.failure = e.what();
  }
  // Baselines tag themselves by kind; keep the requested name so runs are keyed consistently.
  traj.planner = planner;
  traj.planning_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return traj;
}

std::vector<DroneTrajectory> plan_batch(const std::string& planner, const std::vector<PedTrajectory>& peds,
                                        const BoxMap& map, const PlannerSettings& settings, int workers,
                                        const std::set<std::size_t>& inject_failure) {
  validate_planner_name(planner);
  std::vector<DroneTrajectory> out(peds.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < peds.size(); i = next++) {
      if (inject_failure.count(i)) {
        DroneTrajectory t;
        t.path_id = peds[i].id;
        t.planner = planner;
        t.failed = true;
        t.failure = "injected failure";
        out[i] = std::move(t);
        continue;
      }
      out[i] = plan_scenario(planner, peds[i], map, settings);
    }
  };
  const int n = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(peds.size(), 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

void PipelineConfig::validate() const {
  if (map_path.empty()) throw ConfigError("pipeline needs a box map path");
  if (scenarios < 1) throw ConfigError("scenario count must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  validate_planner_name(planner);
  simplify.validate();
  planners.shared.validate();
}

nlohmann::json pipeline_config_to_json(const PipelineConfig& c) {
  return {{"map", c.map_path.string()},
          {"roi", c.roi_path ? nlohmann::json(c.roi_path->string()) : nlohmann::json(nullptr)},
          {"scenarios", c.scenarios},
          {"seed", c.seed},
          {"planner", c.planner},
          {"workers", c.workers},
          {"inject_failure", c.inject_failure},
          {"simplify", simplify_config_to_json(c.simplify)},
          {"simplify_passes", c.simplify_passes},
          {"pedplan", pedplan_config_to_json(c.pedplan)},
          {"planners", planner_settings_to_json(c.planners)},
          {"quality",
           {{"accel_max", c.quality.accel_max},
            {"jerk_max", c.quality.jerk_max},
            {"vis_prefilter", c.quality.vis_prefilter},
            {"smoothness_review", c.quality.smoothness_review}}}};
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& doc) {
  PipelineConfig c;
  try {
    c.map_path = doc.at("map").get<std::string>();
    if (doc.contains("roi") && !doc["roi"].is_null()) c.roi_path = doc["roi"].get<std::string>();
    c.scenarios = doc.value("scenarios", c.scenarios);
    c.seed = doc.value("seed", c.seed);
    c.planner = doc.value("planner", c.planner);
    c.workers = doc.value("workers", c.workers);
    if (doc.contains("inject_failure")) c.inject_failure = doc["inject_failure"].get<std::set<std::size_t>>();
    if (doc.contains("simplify")) c.simplify = simplify_config_from_json(doc["simplify"]);
    if (doc.contains("simplify_passes")) c.simplify_passes = doc["simplify_passes"].get<std::vector<std::string>>();
    if (doc.contains("pedplan")) c.pedplan = pedplan_config_from_json(doc["pedplan"]);
    if (doc.contains("planners")) c.planners = planner_settings_from_json(doc["planners"]);
    if (doc.contains("quality")) {
      const auto& q = doc["quality"];
      c.quality.accel_max = q.value("accel_max", c.quality.accel_max);
      c.quality.jerk_max = q.value("jerk_max", c.quality.jerk_max);
      c.quality.vis_prefilter = q.value("vis_prefilter", c.quality.vis_prefilter);
      c.quality.smoothness_review = q.value("smoothness_review", c.quality.smoothness_review);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("pipeline config: ") + e.what());
  }
  c.validate();
  return c;
}

const std::vector<std::string>& pipeline_stages() {
  static const std::vector<std::string> s{"simplify", "pedplan", "plan", "eval"};
  return s;
}

const std::vector<std::string>& stage_artifacts(const std::string& stage) {
  static const std::vector<std::string> simplify{"boxes_simplified.json", "simplify_report.json"};
  static const std::vector<std::string> pedplan{"path.json", "grid_mask.png", "grid_meta.json", "pedplan_report.json"};
  static const std::vector<std::string> plan{"drone_trace.json", "plan_timings.json"};
  static const std::vector<std::string> eval{"metrics.json"};
  if (stage == "simplify") return simplify;
  if (stage == "pedplan") return pedplan;
  if (stage == "plan") return plan;
  if (stage == "eval") return eval;
  throw ConfigError("unknown stage '" + stage + "'");
}

namespace {

void stage_simplify(const PipelineConfig& c, const std::filesystem::path& dir) {
  const BoxMap map = load_box_map_file(c.map_path);
  auto [out, report] = simplify_pipeline(map, c.simplify, c.simplify_passes);
  write_box_map_file(out, dir / "boxes_simplified.json");
  write_json_atomic(dir / "simplify_report.json", report.to_json());
}

void stage_pedplan(const PipelineConfig& c, const std::filesystem::path& dir) {
  const BoxMap map = load_box_map_file(dir / "boxes_simplified.json");
  std::optional<RoiPolygon> roi;
  if (c.roi_path) roi = load_roi_file(*c.roi_path);
  const auto run = plan_pedestrians_on_map(map, roi ? &*roi : nullptr, c.scenarios, c.seed, c.pedplan);
  write_json_atomic(dir / "path.json", paths_to_json(run.paths, run.grid.spec));
  write_grid_mask_png(run.grid, dir / "grid_mask.png");
  write_json_atomic(dir / "grid_meta.json", grid_spec_to_json(run.grid.spec));
  write_json_atomic(dir / "pedplan_report.json", run.report.to_json());
}

void stage_plan(const PipelineConfig& c, const std::filesystem::path& dir) {
  const BoxMap map = load_box_map_file(dir / "boxes_simplified.json");
  const auto peds = load_paths_file(dir / "path.json");
  const auto traces = plan_batch(c.planner, peds, map, c.planners, c.workers, c.inject_failure);
  write_json_atomic(dir / "drone_trace.json", traces_to_json(traces));
  write_json_atomic(dir / "plan_timings.json", planning_times_to_json(traces));
}

void stage_eval(const PipelineConfig& c, const std::filesystem::path& dir) {
  const BoxMap map = load_box_map_file(dir / "boxes_simplified.json");
  const auto peds = load_paths_file(dir / "path.json");
  const auto traces = load_traces_file(dir / "drone_trace.json");
  const auto timings = read_json_file(dir / "plan_timings.json");
  if (peds.size() != traces.size()) throw ValidationError("path.json and drone_trace.json differ in scenario count");
  PlannerBatch batch;
  batch.planner = c.planner;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < peds.size(); ++i) {
    if (traces[i].path_id != peds[i].id) throw ValidationError("trace order does not match path order");
    ScenarioMetrics sm{peds[i].id, {}, traces[i].failed};
    nlohmann::json row = {{"id", peds[i].id}, {"failed", sm.failed}};
    if (sm.failed) {
      row["failure"] = traces[i].failure;
    } else {
      sm.metrics = trajectory_metrics(traces[i], peds[i], map);
      sm.metrics.planning_time_ms = timings.value(traces[i].path_id + "/" + traces[i].planner, 0.0);
      row["metrics"] = sm.metrics.to_json();
    }
    batch.scenarios.push_back(sm);
    rows.push_back(std::move(row));
  }
  const auto funnel = quality_filter(batch.scenarios, c.quality);
  const std::size_t failed = static_cast<std::size_t>(
      std::count_if(batch.scenarios.begin(), batch.scenarios.end(), [](const auto& s) { return s.failed; }));
  write_json_atomic(dir / "metrics.json", {{"planner", c.planner},
                                           {"scenarios", rows},
                                           {"evaluated", batch.scenarios.size() - failed},
                                           {"failed", failed},
                                           {"mean", batch.mean().to_json()},
                                           {"funnel", funnel.to_json()}});
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_stamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

bool artifacts_present(const std::string& stage, const std::filesystem::path& dir) {
  const auto& names = stage_artifacts(stage);
  return std::all_of(names.begin(), names.end(), [&](const auto& n) { return std::filesystem::exists(dir / n); });
}

// Last finish/give_up event per stage decides whether its artifacts belong to this config.
bool resumable(const std::vector<nlohmann::json>& events, const std::string& stage, const std::string& checksum) {
  const nlohmann::json* last = nullptr;
  for (const auto& e : events)
    if (e.value("stage", "") == stage && (e.value("event", "") == "finish" || e.value("event", "") == "give_up"))
      last = &e;
  return last && last->value("event", "") == "finish" && last->contains("detail") &&
         (*last)["detail"].value("checksum", "") == checksum;
}

}  // namespace

void execute_stage(const std::string& stage, const std::filesystem::path& run_dir) {
  const PipelineConfig cfg = pipeline_config_from_json(read_json_file(run_dir / "config.json"));
  if (stage == "simplify") return stage_simplify(cfg, run_dir);
  if (stage == "pedplan") return stage_pedplan(cfg, run_dir);
  if (stage == "plan") return stage_plan(cfg, run_dir);
  if (stage == "eval") return stage_eval(cfg, run_dir);
  throw ConfigError("unknown stage '" + stage + "'");
}

double StageTimeouts::for_stage(const std::string& stage) const {
  if (stage == "simplify") return simplify;
  if (stage == "pedplan") return pedplan;
  if (stage == "plan") return plan;
  if (stage == "eval") return eval;
  throw ConfigError("no stall timeout configured for stage '" + stage + "'");
}

bool PipelineRun::succeeded() const {
  return std::all_of(stages.begin(), stages.end(), [](const auto& s) { return s.status != StageStatus::kFailed; });
}

nlohmann::json PipelineRun::to_json() const {
  nlohmann::json st = nlohmann::json::array();
  for (const auto& s : stages) st.push_back(s.to_json());
  return {{"run_id", run_id}, {"run_dir", run_dir.string()}, {"stages", st}, {"config", config}, {"artifacts", artifacts}};
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

PipelineRun run_pipeline(const PipelineConfig& cfg_in, const RunOptions& opts) {
  PipelineConfig cfg = cfg_in;
  cfg.validate();
  if (opts.executable.empty()) throw ConfigError("run_pipeline needs the stage executable");
  // Children run with the run directory as cwd, so inputs must be absolute.
  cfg.map_path = std::filesystem::absolute(cfg.map_path);
  if (cfg.roi_path) cfg.roi_path = std::filesystem::absolute(*cfg.roi_path);

  PipelineRun run;
  run.run_id = opts.run_id.empty() ? "run_" + utc_stamp() : opts.run_id;
  run.run_dir = std::filesystem::absolute(opts.out_root / run.run_id);
  std::filesystem::create_directories(run.run_dir / "logs");
  run.config = pipeline_config_to_json(cfg);
  write_json_atomic(run.run_dir / "config.json", run.config);

  std::string material = run.config.dump() + read_text_file(cfg.map_path);
  if (cfg.roi_path) material += read_text_file(*cfg.roi_path);
  const std::string checksum = hex64(fnv1a64(material));

  EventLog log(run.run_dir / "events.ndjson");
  const auto history = EventLog::read(log.path());
  log.append("pipeline", "session_start", 0, {{"run_id", run.run_id}, {"checksum", checksum}});

  bool upstream_failed = false;
  bool upstream_ran = false;
  for (const auto& stage : pipeline_stages()) {
    StageRecord rec;
    rec.stage = stage;
    if (upstream_failed) {
      rec.status = StageStatus::kSkipped;
      log.append(stage, "skip", 0, {{"reason", "upstream_failed"}});
      run.stages.push_back(rec);
      continue;
    }
    if (!upstream_ran && resumable(history, stage, checksum) && artifacts_present(stage, run.run_dir)) {
      rec.status = StageStatus::kSkipped;
      log.append(stage, "skip", 0, {{"reason", "completed"}, {"checksum", checksum}});
      run.stages.push_back(rec);
      for (const auto& a : stage_artifacts(stage)) run.artifacts.push_back(a);
      continue;
    }
    upstream_ran = true;
    for (const auto& a : stage_artifacts(stage)) std::filesystem::remove(run.run_dir / a);

    WatchdogPolicy policy = opts.policy;
    policy.stall_timeout = opts.timeouts.for_stage(stage);
    StageCommand cmd;
    cmd.stage = stage;
    cmd.heartbeat = run.run_dir / (".heartbeat_" + stage);
    char interval[32];
    std::snprintf(interval, sizeof interval, "%g", policy.heartbeat_interval / 2.0);
    cmd.argv = {opts.executable.string(), "stage", stage, "--run-dir", run.run_dir.string(),
                "--heartbeat", cmd.heartbeat.string(), "--heartbeat-interval", interval};
    cmd.working_dir = run.run_dir;
    cmd.output_log = run.run_dir / "logs" / (stage + ".log");
    cmd.finish_detail = {{"checksum", checksum}, {"artifacts", stage_artifacts(stage)}};
    rec = run_stage(cmd, policy, log);
    if (rec.status == StageStatus::kSucceeded && !artifacts_present(stage, run.run_dir)) {
      rec.status = StageStatus::kFailed;
      log.append(stage, "give_up", rec.attempts, {{"reason", "missing_artifacts"}});
    }
    if (rec.status == StageStatus::kSucceeded) {
      for (const auto& a : stage_artifacts(stage)) run.artifacts.push_back(a);
    } else {
      upstream_failed = true;
    }
    run.stages.push_back(rec);
    write_json_atomic(run.run_dir / "run.json", run.to_json());
  }
  write_json_atomic(run.run_dir / "run.json", run.to_json());
  return run;
}

}  // namespace cosplan
