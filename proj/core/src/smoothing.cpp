// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/smoothing.hpp"

#include <algorithm>
#include <numeric>

#include "cosplan/errors.hpp"

namespace cosplan {

void SmoothConfig::validate() const {
  if (shortcut_span < 0 || elastic_iters < 0) throw ConfigError("smoothing counts must be >= 0");
  if (!(elastic_step_min > 0.0 && elastic_step_min <= elastic_step_max && elastic_step_max <= 1.0))
    throw ConfigError("elastic step range must be ordered within (0, 1]");
  for (double d : {per_frame_vis_drop, mean_vis_drop, anchor_threshold})
    if (!(d >= 0.0 && d <= 1.0)) throw ConfigError("visibility drops and anchor threshold must lie in [0, 1]");
}

nlohmann::json smooth_config_to_json(const SmoothConfig& c) {
  return {{"shortcut_span", c.shortcut_span},
          {"elastic_iters", c.elastic_iters},
          {"elastic_step_range", {c.elastic_step_min, c.elastic_step_max}},
          {"per_frame_vis_drop", c.per_frame_vis_drop},
          {"mean_vis_drop", c.mean_vis_drop},
          {"anchor_threshold", c.anchor_threshold}};
}

SmoothConfig smooth_config_from_json(const nlohmann::json& doc, SmoothConfig c) {
  c.shortcut_span = doc.value("shortcut_span", c.shortcut_span);
  c.elastic_iters = doc.value("elastic_iters", c.elastic_iters);
  if (doc.contains("elastic_step_range")) {
    c.elastic_step_min = doc["elastic_step_range"].at(0).get<double>();
    c.elastic_step_max = doc["elastic_step_range"].at(1).get<double>();
  }
  c.per_frame_vis_drop = doc.value("per_frame_vis_drop", c.per_frame_vis_drop);
  c.mean_vis_drop = doc.value("mean_vis_drop", c.mean_vis_drop);
  c.anchor_threshold = doc.value("anchor_threshold", c.anchor_threshold);
  c.validate();
  return c;
}

namespace {

class Validator {
 public:
  Validator(const PedTrajectory& ped, const BoxMap& map, const SharedPlannerConfig& shared, const SmoothConfig& cfg,
            std::vector<double> raw_vis)
      : ped_(ped), map_(map), shared_(shared), cfg_(cfg), raw_vis_(std::move(raw_vis)) {}

  [[nodiscard]] double allowed_drop(std::size_t i) const {
    return raw_vis_[i] >= cfg_.anchor_threshold ? 0.0 : cfg_.per_frame_vis_drop;
  }

  // Point-wise checks only; displacement is checked by the caller.
  [[nodiscard]] bool point_ok(std::size_t i, const Vec3& q) const {
    if (q.z() < shared_.z_min - 1e-9 || q.z() > shared_.z_max + 1e-9) return false;
    if (map_.signed_clearance(q) < shared_.safety_distance) return false;
    const double v = visibility_5ray(q, ped_.position(i), map_, cfg_.visibility);
    return v >= raw_vis_[i] - allowed_drop(i) - 1e-12;
  }

  [[nodiscard]] bool step_ok(const Vec3& a, const Vec3& b) const {
    return (b - a).norm() <= shared_.max_step() + 1e-9;
  }

 private:
  const PedTrajectory& ped_;
  const BoxMap& map_;
  const SharedPlannerConfig& shared_;
  const SmoothConfig& cfg_;
  std::vector<double> raw_vis_;
};

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

DroneTrajectory smooth_trajectory(const DroneTrajectory& raw, const PedTrajectory& ped, const BoxMap& map,
                                  const SharedPlannerConfig& shared, const SmoothConfig& cfg) {
  shared.validate();
  cfg.validate();
  if (raw.size() != ped.size()) throw ValidationError("smoothing needs a trajectory aligned with the pedestrian");
  const std::size_t n = raw.size();

  std::vector<double> raw_vis(n);
  for (std::size_t i = 0; i < n; ++i) raw_vis[i] = visibility_5ray(raw.waypoints[i].p, ped.position(i), map, cfg.visibility);
  Validator valid(ped, map, shared, cfg, raw_vis);
  std::vector<Vec3> pts = raw.positions();

  // Shortcuts: replace the longest admissible span starting at i by a line.
  int shortcuts = 0;
  for (std::size_t i = 0; i + 2 < n;) {
    bool applied = false;
    const std::size_t last = std::min(n - 1, i + static_cast<std::size_t>(std::max(cfg.shortcut_span, 0)));
    for (std::size_t j = last; j >= i + 2 && !applied; --j) {
      std::vector<Vec3> cand(j - i - 1);
      double moved = 0.0;
      bool ok = true;
      for (std::size_t k = i + 1; k < j && ok; ++k) {
        const double u = static_cast<double>(k - i) / static_cast<double>(j - i);
        const Vec3 q = pts[i] + u * (pts[j] - pts[i]);
        moved = std::max(moved, (q - pts[k]).norm());
        ok = valid.point_ok(k, q) && valid.step_ok(k == i + 1 ? pts[i] : cand[k - i - 2], q);
        cand[k - i - 1] = q;
      }
      if (ok) ok = valid.step_ok(cand.back(), pts[j]);
      if (ok && moved > 1e-9) {
        std::copy(cand.begin(), cand.end(), pts.begin() + static_cast<std::ptrdiff_t>(i + 1));
        ++shortcuts;
        applied = true;
        i = j;
      }
      if (j == i + 2) break;
    }
    if (!applied) ++i;
  }

  // Elastic band: pull interior points toward their neighbours' midpoint.
  int elastic_updates = 0;
  for (int sweep = 0; sweep < cfg.elastic_iters; ++sweep) {
    int updates = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const Vec3 mid = 0.5 * (pts[i - 1] + pts[i + 1]);
      if ((mid - pts[i]).norm() <= 1e-9) continue;
      for (double alpha = cfg.elastic_step_max; alpha >= cfg.elastic_step_min - 1e-15; alpha *= 0.5) {
        const Vec3 q = pts[i] + alpha * (mid - pts[i]);
        if (valid.step_ok(pts[i - 1], q) && valid.step_ok(q, pts[i + 1]) && valid.point_ok(i, q)) {
          pts[i] = q;
          ++updates;
          break;
        }
      }
    }
    elastic_updates += updates;
    if (updates == 0) break;
  }

  // Final acceptance on the whole trajectory.
  std::vector<double> vis(n);
  double min_clear = std::numeric_limits<double>::infinity();
  bool per_frame_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    vis[i] = visibility_5ray(pts[i], ped.position(i), map, cfg.visibility);
    min_clear = std::min(min_clear, map.signed_clearance(pts[i]));
    if (vis[i] < raw_vis[i] - valid.allowed_drop(i) - 1e-12) per_frame_ok = false;
  }
  const double drop = mean(raw_vis) - mean(vis);
  const bool accept = drop <= cfg.mean_vis_drop + 1e-12 && min_clear >= shared.safety_distance && per_frame_ok;

  DroneTrajectory out = raw;
  out.planner = raw.planner + "_smooth";
  if (accept) {
    out.set_positions(pts);
    out.visibility = vis;
  } else {
    out.visibility = raw_vis;
  }
  nlohmann::json diag = raw.diagnostics;
  diag["smoothing"] = {{"accepted_shortcuts", shortcuts},
                       {"elastic_updates", elastic_updates},
                       {"fell_back_to_raw", !accept},
                       {"raw_mean_visibility", mean(raw_vis)},
                       {"smoothed_mean_visibility", mean(vis)},
                       {"smoothed_min_clearance", min_clear}};
  out.diagnostics = diag;
  out.config["smoothing"] = smooth_config_to_json(cfg);
  return out;
}

DroneTrajectory plan_tastar_smooth(const PedTrajectory& ped, const BoxMap& map, const SharedPlannerConfig& shared,
                                   const TaStarConfig& tcfg, const SmoothConfig& scfg) {
  return smooth_trajectory(plan_tastar(ped, map, shared, tcfg), ped, map, shared, scfg);
}

}  // namespace cosplan
