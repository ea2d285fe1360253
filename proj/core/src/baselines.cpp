// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "baseline_internal.hpp"
#include "cosplan/errors.hpp"
#include "cosplan/rng.hpp"

namespace cosplan {

namespace {

constexpr std::array<std::pair<BaselineKind, std::string_view>, 12> kNames{{
    {BaselineKind::kAstar3d, "astar3d"},
    {BaselineKind::kWeightedAstar, "weighted_astar"},
    {BaselineKind::kThetaStar, "theta_star"},
    {BaselineKind::kVisibilityAstar, "visibility_astar"},
    {BaselineKind::kRrtStar, "rrt_star"},
    {BaselineKind::kPrm, "prm"},
    {BaselineKind::kBsplinePrm, "bspline_prm"},
    {BaselineKind::kElasticBand, "elastic_band"},
    {BaselineKind::kMinimumJerk, "minimum_jerk"},
    {BaselineKind::kPotentialField, "potential_field"},
    {BaselineKind::kChompLite, "chomp_lite"},
    {BaselineKind::kQuasiNewtonTrajopt, "quasi_newton_trajopt"},
}};

}  // namespace

const std::array<BaselineKind, 12>& all_baseline_kinds() {
  static const std::array<BaselineKind, 12> kinds = [] {
    std::array<BaselineKind, 12> out{};
    for (std::size_t i = 0; i < kNames.size(); ++i) out[i] = kNames[i].first;
    return out;
  }();
  return kinds;
}

std::string_view baseline_name(BaselineKind kind) {
  for (const auto& [k, name] : kNames)
    if (k == kind) return name;
  return "unknown";
}

BaselineKind parse_baseline_kind(std::string_view name) {
  for (const auto& [k, n] : kNames)
    if (n == name) return k;
  throw ConfigError("unknown baseline kind '" + std::string(name) + "'");
}

void BaselineConfig::validate() const {
  for (double v : {voxel, weighted_epsilon, clearance_margin, goal_radius, rrt_step, rrt_rewire_radius, path_spacing,
                   elastic_step, pf_step_size, pf_influence, chomp_epsilon, chomp_step, repair_margin,
                   vertical_extent})
    if (!(v > 0.0)) throw ConfigError("baseline lengths, steps and gains must be > 0");
  if (!(bounds_padding >= 0.0 && anchor_search_radius >= 0.0)) throw ConfigError("baseline padding must be >= 0");
  if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) throw ConfigError("goal bias must lie in [0, 1]");
  // Sample budgets may be zero: the planner then reports a labeled failure.
  if (rrt_samples < 0 || prm_samples < 0) throw ConfigError("sample budgets must be >= 0");
  if (prm_k < 1 || elastic_sweeps < 1 || minjerk_decimation < 1 || pf_steps < 1 || chomp_iters < 1 || qn_iters < 1 ||
      qn_memory < 1 || repair_rounds < 1 || max_expansions < 1)
    throw ConfigError("baseline iteration counts must be >= 1");
  if (!(pf_attractive_gain >= 0.0 && pf_repulsive_gain >= 0.0 && chomp_obstacle_weight >= 0.0 &&
        qn_clearance_weight >= 0.0))
    throw ConfigError("baseline weights must be >= 0");
}

nlohmann::json baseline_config_to_json(const BaselineConfig& c) {
  return {{"voxel", c.voxel},
          {"weighted_epsilon", c.weighted_epsilon},
          {"max_expansions", c.max_expansions},
          {"clearance_margin", c.clearance_margin},
          {"goal_radius", c.goal_radius},
          {"bounds_padding", c.bounds_padding},
          {"vertical_extent", c.vertical_extent},
          {"anchor_search_radius", c.anchor_search_radius},
          {"rrt_step", c.rrt_step},
          {"rrt_samples", c.rrt_samples},
          {"rrt_rewire_radius", c.rrt_rewire_radius},
          {"goal_bias", c.goal_bias},
          {"prm_samples", c.prm_samples},
          {"prm_k", c.prm_k},
          {"shortcut_sampling", c.shortcut_sampling},
          {"path_spacing", c.path_spacing},
          {"elastic_sweeps", c.elastic_sweeps},
          {"elastic_step", c.elastic_step},
          {"minjerk_decimation", c.minjerk_decimation},
          {"pf_attractive_gain", c.pf_attractive_gain},
          {"pf_repulsive_gain", c.pf_repulsive_gain},
          {"pf_influence", c.pf_influence},
          {"pf_steps", c.pf_steps},
          {"pf_step_size", c.pf_step_size},
          {"chomp_iters", c.chomp_iters},
          {"chomp_epsilon", c.chomp_epsilon},
          {"chomp_obstacle_weight", c.chomp_obstacle_weight},
          {"chomp_step", c.chomp_step},
          {"qn_iters", c.qn_iters},
          {"qn_memory", c.qn_memory},
          {"qn_clearance_weight", c.qn_clearance_weight},
          {"repair_enabled", c.repair_enabled},
          {"repair_margin", c.repair_margin},
          {"repair_rounds", c.repair_rounds},
          {"rng_seed", c.rng_seed}};
}

BaselineConfig baseline_config_from_json(const nlohmann::json& doc, BaselineConfig c) {
#define COSPLAN_FIELD(name) c.name = doc.value(#name, c.name)
  COSPLAN_FIELD(voxel);
  COSPLAN_FIELD(weighted_epsilon);
  COSPLAN_FIELD(max_expansions);
  COSPLAN_FIELD(clearance_margin);
  COSPLAN_FIELD(goal_radius);
  COSPLAN_FIELD(bounds_padding);
  COSPLAN_FIELD(vertical_extent);
  COSPLAN_FIELD(anchor_search_radius);
  COSPLAN_FIELD(rrt_step);
  COSPLAN_FIELD(rrt_samples);
  COSPLAN_FIELD(rrt_rewire_radius);
  COSPLAN_FIELD(goal_bias);
  COSPLAN_FIELD(prm_samples);
  COSPLAN_FIELD(prm_k);
  COSPLAN_FIELD(shortcut_sampling);
  COSPLAN_FIELD(path_spacing);
  COSPLAN_FIELD(elastic_sweeps);
  COSPLAN_FIELD(elastic_step);
  COSPLAN_FIELD(minjerk_decimation);
  COSPLAN_FIELD(pf_attractive_gain);
  COSPLAN_FIELD(pf_repulsive_gain);
  COSPLAN_FIELD(pf_influence);
  COSPLAN_FIELD(pf_steps);
  COSPLAN_FIELD(pf_step_size);
  COSPLAN_FIELD(chomp_iters);
  COSPLAN_FIELD(chomp_epsilon);
  COSPLAN_FIELD(chomp_obstacle_weight);
  COSPLAN_FIELD(chomp_step);
  COSPLAN_FIELD(qn_iters);
  COSPLAN_FIELD(qn_memory);
  COSPLAN_FIELD(qn_clearance_weight);
  COSPLAN_FIELD(repair_enabled);
  COSPLAN_FIELD(repair_margin);
  COSPLAN_FIELD(repair_rounds);
  COSPLAN_FIELD(rng_seed);
#undef COSPLAN_FIELD
  c.validate();
  return c;
}

namespace baseline_detail {

bool Problem::point_free(const Vec3& p) const { return map.signed_clearance(p) >= cfg.clearance_margin; }

bool Problem::segment_free(const Vec3& a, const Vec3& b) const {
  return !map.segment_blocked(a, b, 0.0, 0.5 * cfg.clearance_margin);
}

double polyline_length(const std::vector<Vec3>& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
  return len;
}

std::vector<Vec3> straight_line(const Vec3& a, const Vec3& b, double spacing) {
  const std::size_t segs = std::max<std::size_t>(7, static_cast<std::size_t>(std::ceil((b - a).norm() / spacing)));
  std::vector<Vec3> out(segs + 1);
  for (std::size_t i = 0; i <= segs; ++i) out[i] = a + (b - a) * (static_cast<double>(i) / static_cast<double>(segs));
  return out;
}

std::vector<Vec3> shortcut(const Problem& pb, const std::vector<Vec3>& path) {
  if (path.size() <= 2) return path;
  std::vector<Vec3> out{path.front()};
  std::size_t i = 0;
  while (i + 1 < path.size()) {
    std::size_t j = path.size() - 1;
    while (j > i + 1 && !pb.segment_free(path[i], path[j])) --j;
    out.push_back(path[j]);
    i = j;
  }
  return out;
}

namespace {

std::optional<Vec3> anchor(const Problem& pb, const Vec3& p) {
  if (pb.in_bounds(p) && pb.point_free(p)) return p;
  const double step = pb.cfg.voxel;
  const int reach = static_cast<int>(std::ceil(pb.cfg.anchor_search_radius / step));
  std::vector<std::pair<double, Vec3>> cands;
  for (int dz = -reach; dz <= reach; ++dz)
    for (int dy = -reach; dy <= reach; ++dy)
      for (int dx = -reach; dx <= reach; ++dx) {
        const Vec3 q = p + Vec3(dx, dy, dz) * step;
        const double d = (q - p).norm();
        if (d <= pb.cfg.anchor_search_radius && pb.in_bounds(q)) cands.emplace_back(d, q);
      }
  std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [d, q] : cands)
    if (pb.point_free(q)) return q;
  return std::nullopt;
}

PathResult dispatch(BaselineKind kind, const Problem& pb) {
  const std::uint64_t seed = derive_seed(pb.cfg.rng_seed, static_cast<std::uint64_t>(kind));
  switch (kind) {
    case BaselineKind::kAstar3d: return search_grid(pb, 1.0, false);
    case BaselineKind::kWeightedAstar: return search_grid(pb, pb.cfg.weighted_epsilon, false);
    case BaselineKind::kThetaStar: return search_grid(pb, 1.0, true);
    case BaselineKind::kVisibilityAstar: return search_visibility_graph(pb);
    case BaselineKind::kRrtStar: return rrt_star(pb, seed);
    case BaselineKind::kPrm: return prm(pb, seed);
    case BaselineKind::kBsplinePrm: return bspline_prm(pb, seed);
    case BaselineKind::kElasticBand: return elastic_band(pb);
    case BaselineKind::kMinimumJerk: return minimum_jerk(pb);
    case BaselineKind::kPotentialField: return potential_field(pb);
    case BaselineKind::kChompLite: return chomp_lite(pb);
    case BaselineKind::kQuasiNewtonTrajopt: return quasi_newton_trajopt(pb);
  }
  return {{}, "unknown kind", {}};
}

}  // namespace
}  // namespace baseline_detail

std::vector<Vec3> resample_arc_length(const std::vector<Vec3>& path, std::size_t n, double max_step) {
  if (path.empty()) throw ValidationError("cannot resample an empty path");
  std::vector<Vec3> out(n, path.front());
  if (n <= 1) return out;
  std::vector<double> cum(path.size(), 0.0);
  for (std::size_t i = 1; i < path.size(); ++i) cum[i] = cum[i - 1] + (path[i] - path[i - 1]).norm();
  const double total = cum.back();
  const double spacing = std::min(max_step, total / static_cast<double>(n - 1));
  std::size_t seg = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::min(total, static_cast<double>(i) * spacing);
    while (seg + 1 < path.size() && cum[seg] < s) ++seg;
    if (path.size() == 1) continue;
    const double len = cum[seg] - cum[seg - 1];
    const double u = len > 0.0 ? std::clamp((s - cum[seg - 1]) / len, 0.0, 1.0) : 1.0;
    out[i] = path[seg - 1] + u * (path[seg] - path[seg - 1]);
  }
  return out;
}

DroneTrajectory plan_baseline(BaselineKind kind, const PedTrajectory& ped, const BoxMap& map,
                              const SharedPlannerConfig& shared, const BaselineConfig& cfg) {
  using namespace baseline_detail;
  shared.validate();
  cfg.validate();
  if (ped.empty()) throw ValidationError("baseline planning needs a non-empty pedestrian trajectory");
  const auto t0 = std::chrono::steady_clock::now();
  const std::string tag = "baseline:" + std::string(baseline_name(kind));

  const auto headings = ped_headings(ped);
  const Vec3 nominal_start = behind_pose(ped.position(0), headings.front(), shared);
  const Vec3 nominal_goal = behind_pose(ped.position(ped.size() - 1), headings.back(), shared);

  Aabb bounds{nominal_start, nominal_start};
  bounds.expand({nominal_goal, nominal_goal});
  for (const auto& w : ped.waypoints) bounds.expand({w.p, w.p});
  bounds.lo.head<2>().array() -= cfg.bounds_padding;
  bounds.hi.head<2>().array() += cfg.bounds_padding;
  bounds.lo.z() = shared.z_min;
  bounds.hi.z() = std::min(shared.z_max, shared.z_pref + cfg.vertical_extent);

  Problem pb{map, shared, cfg, nominal_start, nominal_goal, bounds};
  const auto start = anchor(pb, nominal_start);
  const auto goal = anchor(pb, nominal_goal);

  auto fail = [&](const std::string& why) {
    DroneTrajectory traj = make_drone_trajectory(ped, std::vector<Vec3>(ped.size(), nominal_start), tag);
    traj.failed = true;
    traj.failure = why;
    traj.config = {{"kind", baseline_name(kind)},
                   {"shared", shared_config_to_json(shared)},
                   {"baseline", baseline_config_to_json(cfg)}};
    traj.diagnostics = {{"failure", why}};
    traj.planning_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    annotate_visibility(traj, ped, map);
    return traj;
  };
  if (!start) return fail("no free start anchor near the behind pose");
  if (!goal) return fail("no free goal anchor near the final behind pose");
  pb.start = *start;
  pb.goal = *goal;

  PathResult res = dispatch(kind, pb);
  if (!res.failure.empty() || res.path.empty()) return fail(res.failure.empty() ? "empty path" : res.failure);

  DroneTrajectory traj = make_drone_trajectory(ped, resample_arc_length(res.path, ped.size(), shared.max_step()), tag);
  traj.config = {{"kind", baseline_name(kind)},
                 {"shared", shared_config_to_json(shared)},
                 {"baseline", baseline_config_to_json(cfg)}};
  nlohmann::json diag = res.diagnostics;
  diag["geometric_length_m"] = polyline_length(res.path);
  diag["geometric_points"] = res.path.size();
  diag["reached_goal"] = (traj.waypoints.back().p - pb.goal).norm() <= cfg.goal_radius + 1e-9;
  diag["start_anchor_offset_m"] = (pb.start - nominal_start).norm();
  diag["goal_anchor_offset_m"] = (pb.goal - nominal_goal).norm();
  traj.diagnostics = diag;
  if (cfg.repair_enabled) traj = repair_collisions(traj, map, shared, {cfg.repair_margin, cfg.repair_rounds});
  annotate_visibility(traj, ped, map);
  traj.planning_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return traj;
}

}  // namespace cosplan
