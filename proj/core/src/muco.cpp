// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/muco.hpp"

#include <algorithm>
#include <cmath>

#include "cosplan/errors.hpp"

namespace cosplan {

void MuCoConfig::validate() const {
  if (!(fd_epsilon > 0.0)) throw ConfigError("MuCO fd_epsilon must be > 0");
  if (!(step_cap > 0.0)) throw ConfigError("MuCO step cap must be > 0");
  if (!(learning_rate > 0.0)) throw ConfigError("MuCO learning rate must be > 0");
  if (max_iters < 0) throw ConfigError("MuCO max_iters must be >= 0");
  for (double v : {w.tracking, w.smoothness, w.jerk, w.safety, w.visibility, w.view_angle, w.path, alt_below,
                   alt_above_pref, alt_oscillation, pitch_band_coeff})
    if (!(v >= 0.0)) throw ConfigError("MuCO weights must be >= 0");
  if (!(pitch_band_lo_deg <= pitch_band_hi_deg)) throw ConfigError("MuCO pitch band must be ordered");
  if (pushout_iters < 0 || circling_run_length < 1) throw ConfigError("MuCO counts out of range");
}

nlohmann::json muco_config_to_json(const MuCoConfig& c) {
  return {{"fd_epsilon", c.fd_epsilon},
          {"learning_rate", c.learning_rate},
          {"step_cap", c.step_cap},
          {"max_iters", c.max_iters},
          {"convergence_dL", c.convergence_dL},
          {"d_opt", c.d_opt},
          {"d_influence", c.d_influence},
          {"weights",
           {{"tracking", c.w.tracking},
            {"smoothness", c.w.smoothness},
            {"jerk", c.w.jerk},
            {"safety", c.w.safety},
            {"visibility", c.w.visibility},
            {"view_angle", c.w.view_angle},
            {"path", c.w.path}}},
          {"path_scale", c.path_scale},
          {"altitude_coeffs", {{"below", c.alt_below}, {"above_pref", c.alt_above_pref}, {"oscillation", c.alt_oscillation}}},
          {"pitch_band_deg", {c.pitch_band_lo_deg, c.pitch_band_hi_deg}},
          {"pitch_target_deg", c.pitch_target_deg},
          {"pitch_band_coeff", c.pitch_band_coeff},
          {"heading_window", c.heading_window},
          {"pushout_iters", c.pushout_iters},
          {"circling", {{"vis_threshold", c.circling_vis_threshold}, {"run_length", c.circling_run_length}}}};
}

MuCoConfig muco_config_from_json(const nlohmann::json& doc, MuCoConfig c) {
  c.fd_epsilon = doc.value("fd_epsilon", c.fd_epsilon);
  c.learning_rate = doc.value("learning_rate", c.learning_rate);
  c.step_cap = doc.value("step_cap", c.step_cap);
  c.max_iters = doc.value("max_iters", c.max_iters);
  c.convergence_dL = doc.value("convergence_dL", c.convergence_dL);
  c.d_opt = doc.value("d_opt", c.d_opt);
  c.d_influence = doc.value("d_influence", c.d_influence);
  if (doc.contains("weights")) {
    const auto& w = doc["weights"];
    c.w.tracking = w.value("tracking", c.w.tracking);
    c.w.smoothness = w.value("smoothness", c.w.smoothness);
    c.w.jerk = w.value("jerk", c.w.jerk);
    c.w.safety = w.value("safety", c.w.safety);
    c.w.visibility = w.value("visibility", c.w.visibility);
    c.w.view_angle = w.value("view_angle", c.w.view_angle);
    c.w.path = w.value("path", c.w.path);
  }
  c.path_scale = doc.value("path_scale", c.path_scale);
  if (doc.contains("altitude_coeffs")) {
    const auto& a = doc["altitude_coeffs"];
    c.alt_below = a.value("below", c.alt_below);
    c.alt_above_pref = a.value("above_pref", c.alt_above_pref);
    c.alt_oscillation = a.value("oscillation", c.alt_oscillation);
  }
  if (doc.contains("pitch_band_deg")) {
    c.pitch_band_lo_deg = doc["pitch_band_deg"].at(0).get<double>();
    c.pitch_band_hi_deg = doc["pitch_band_deg"].at(1).get<double>();
  }
  c.pitch_target_deg = doc.value("pitch_target_deg", c.pitch_target_deg);
  c.pitch_band_coeff = doc.value("pitch_band_coeff", c.pitch_band_coeff);
  c.heading_window = doc.value("heading_window", c.heading_window);
  c.pushout_iters = doc.value("pushout_iters", c.pushout_iters);
  if (doc.contains("circling")) {
    c.circling_vis_threshold = doc["circling"].value("vis_threshold", c.circling_vis_threshold);
    c.circling_run_length = doc["circling"].value("run_length", c.circling_run_length);
  }
  c.validate();
  return c;
}

nlohmann::json MuCoLoss::to_json() const {
  return {{"tracking", tracking},     {"smoothness", smoothness}, {"jerk", jerk},
          {"safety", safety},         {"visibility", visibility}, {"view_angle", view_angle},
          {"path_length", path},      {"altitude", altitude},     {"pitch_band", pitch_band},
          {"total", total()}};
}

namespace {

// Evaluates the loss terms. Point terms depend on one waypoint; window terms
// on a short stencil, so a coordinate perturbation only touches a few.
class LossModel {
 public:
  LossModel(const PedTrajectory& ped, const BoxMap& map, const SharedPlannerConfig& shared, const MuCoConfig& cfg)
      : ped_(ped), map_(map), shared_(shared), cfg_(cfg), headings_(ped_headings(ped, cfg.heading_window)) {}

  [[nodiscard]] std::size_t size() const { return ped_.size(); }

  // Point terms at frame i. `include_vis` adds the visibility and view terms.
  void point(std::size_t i, const Vec3& p, bool include_vis, MuCoLoss& out, bool compute_vis = true) const {
    const Vec3& x = ped_.position(i);
    const Vec3 d = p - x;
    const double dist = d.norm();
    out.tracking += cfg_.w.tracking * (dist - cfg_.d_opt) * (dist - cfg_.d_opt);

    const double c = map_.signed_clearance(p);
    if (c < cfg_.d_influence) out.safety += cfg_.w.safety * 0.5 * (cfg_.d_influence - c) * (cfg_.d_influence - c);

    const double below = std::max(0.0, shared_.z_min - p.z());
    const double above = std::max(0.0, p.z() - shared_.z_pref);
    out.altitude += cfg_.alt_below * below * below + cfg_.alt_above_pref * above * above;

    const double horiz = d.head<2>().norm();
    const double pitch = std::atan2(d.z(), horiz);
    const double lo = deg2rad(cfg_.pitch_band_lo_deg), hi = deg2rad(cfg_.pitch_band_hi_deg);
    const double band = std::max(0.0, lo - pitch) + std::max(0.0, pitch - hi);
    out.pitch_band += cfg_.pitch_band_coeff * band * band;

    if (!include_vis || !compute_vis) return;
    const double v = visibility_5ray(p, x, map_, cfg_.visibility);
    out.visibility += cfg_.w.visibility * (1.0 - v) * (1.0 - v);
    const double dp = pitch - deg2rad(cfg_.pitch_target_deg);
    double dh = 0.0;
    if (horiz > 1e-9) {
      const Vec2& h = headings_[i];
      dh = wrap_angle(std::atan2(d.y(), d.x()) - std::atan2(-h.y(), -h.x()));
    }
    out.view_angle += cfg_.w.view_angle * (dp * dp + dh * dh);
  }

  void smooth(const Vec3& a, const Vec3& b, const Vec3& c, MuCoLoss& out) const {
    out.smoothness += cfg_.w.smoothness * (c - 2.0 * b + a).squaredNorm();
    const double dz = c.z() - 2.0 * b.z() + a.z();
    out.altitude += cfg_.alt_oscillation * dz * dz;
  }

  void jerk(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, MuCoLoss& out) const {
    out.jerk += cfg_.w.jerk * (d - 3.0 * c + 3.0 * b - a).squaredNorm();
  }

  void path(const Vec3& a, const Vec3& b, MuCoLoss& out) const {
    out.path += cfg_.w.path * cfg_.path_scale * (b - a).norm();
  }

  // Every term that involves waypoint i, with pts[i] replaced by q.
  [[nodiscard]] double local(const std::vector<Vec3>& pts, std::size_t i, const Vec3& q, bool include_vis) const {
    const std::size_t n = pts.size();
    auto at = [&](std::size_t k) -> const Vec3& { return k == i ? q : pts[k]; };
    MuCoLoss l;
    point(i, q, include_vis, l);
    for (std::size_t c = (i >= 1 ? i - 1 : 0); c <= i + 1 && c + 1 < n; ++c)
      if (c >= 1) smooth(at(c - 1), at(c), at(c + 1), l);
    for (std::size_t j = (i >= 2 ? i - 2 : 0); j <= i + 1 && j + 2 < n; ++j)
      if (j >= 1) jerk(at(j - 1), at(j), at(j + 1), at(j + 2), l);
    if (i >= 1) path(at(i - 1), at(i), l);
    if (i + 1 < n) path(at(i), at(i + 1), l);
    return l.total();
  }

  [[nodiscard]] MuCoEvaluation full(const std::vector<Vec3>& pts, const std::vector<bool>& mask) const {
    MuCoEvaluation e;
    const std::size_t n = pts.size();
    MuCoLoss masked;
    for (std::size_t i = 0; i < n; ++i) {
      const bool m = i < mask.size() && mask[i];
      point(i, pts[i], true, m ? masked : e.breakdown);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) smooth(pts[i - 1], pts[i], pts[i + 1], e.breakdown);
    for (std::size_t j = 1; j + 2 < n; ++j) jerk(pts[j - 1], pts[j], pts[j + 1], pts[j + 2], e.breakdown);
    for (std::size_t i = 0; i + 1 < n; ++i) path(pts[i], pts[i + 1], e.breakdown);
    e.objective = e.breakdown.total();
    // Masked frames are reported but do not steer the optimizer.
    e.objective += masked.total() - masked.visibility - masked.view_angle;
    e.breakdown.tracking += masked.tracking;
    e.breakdown.safety += masked.safety;
    e.breakdown.altitude += masked.altitude;
    e.breakdown.pitch_band += masked.pitch_band;
    e.breakdown.visibility += masked.visibility;
    e.breakdown.view_angle += masked.view_angle;
    return e;
  }

 private:
  const PedTrajectory& ped_;
  const BoxMap& map_;
  const SharedPlannerConfig& shared_;
  const MuCoConfig& cfg_;
  std::vector<Vec2> headings_;
};

}  // namespace

MuCoEvaluation muco_loss(const std::vector<Vec3>& pts, const PedTrajectory& ped, const BoxMap& map,
                         const SharedPlannerConfig& shared, const MuCoConfig& cfg, const std::vector<bool>& mask) {
  if (pts.size() != ped.size()) throw ValidationError("MuCO loss needs a trajectory aligned with the pedestrian");
  return LossModel(ped, map, shared, cfg).full(pts, mask);
}

namespace {

std::vector<Vec3> gradient(const LossModel& model, const std::vector<Vec3>& pts, const SharedPlannerConfig& shared,
                           const MuCoConfig& cfg, const std::vector<bool>& mask) {
  const std::size_t n = pts.size();
  std::vector<Vec3> g(n, Vec3::Zero());
  const double eps = cfg.fd_epsilon;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const bool include_vis = !(i < mask.size() && mask[i]);
    for (int k = 0; k < 3; ++k) {
      Vec3 plus = pts[i], minus = pts[i];
      plus[k] += eps;
      minus[k] -= eps;
      // Probes stay inside the altitude band: a waypoint resting on z_min
      // would otherwise difference across the floor penalty.
      if (k == 2) {
        plus.z() = std::min(plus.z(), std::max(shared.z_max, pts[i].z()));
        minus.z() = std::max(minus.z(), std::min(shared.z_min, pts[i].z()));
      }
      const double span = plus[k] - minus[k];
      if (span <= 0.0) continue;
      g[i][k] = (model.local(pts, i, plus, include_vis) - model.local(pts, i, minus, include_vis)) / span;
    }
  }
  return g;
}

}  // namespace

std::vector<Vec3> muco_gradient(const std::vector<Vec3>& pts, const PedTrajectory& ped, const BoxMap& map,
                                const SharedPlannerConfig& shared, const MuCoConfig& cfg,
                                const std::vector<bool>& mask) {
  return gradient(LossModel(ped, map, shared, cfg), pts, shared, cfg, mask);
}

namespace {

double smoothness_value(const std::vector<Vec3>& pts, double w) {
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) s += w * (pts[i + 1] - 2.0 * pts[i] + pts[i - 1]).squaredNorm();
  return s;
}

}  // namespace

std::vector<Vec3> smoothness_gradient_fd(const std::vector<Vec3>& pts, double weight, double eps) {
  std::vector<Vec3> g(pts.size(), Vec3::Zero());
  std::vector<Vec3> work = pts;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int k = 0; k < 3; ++k) {
      work[i][k] = pts[i][k] + eps;
      const double up = smoothness_value(work, weight);
      work[i][k] = pts[i][k] - eps;
      const double down = smoothness_value(work, weight);
      work[i][k] = pts[i][k];
      g[i][k] = (up - down) / (2.0 * eps);
    }
  return g;
}

std::vector<Vec3> smoothness_gradient_analytic(const std::vector<Vec3>& pts, double weight) {
  // d/dp_j of sum_i w |p_{i+1} - 2 p_i + p_{i-1}|^2 collects the three
  // stencils that contain p_j with coefficients 1, -2, 1.
  const std::size_t n = pts.size();
  std::vector<Vec3> g(n, Vec3::Zero());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec3 r = 2.0 * weight * (pts[i + 1] - 2.0 * pts[i] + pts[i - 1]);
    g[i - 1] += r;
    g[i] -= 2.0 * r;
    g[i + 1] += r;
  }
  return g;
}

Vec3 project_feasible(const Vec3& p_in, const std::optional<Vec3>& prev, const BoxMap& map,
                      const SharedPlannerConfig& shared, const MuCoConfig& cfg) {
  auto clamp_z = [&](Vec3 q) {
    q.z() = std::clamp(q.z(), shared.z_min, shared.z_max);
    return q;
  };
  Vec3 p = clamp_z(p_in);
  if (prev) p = clamp_step(p, *prev, shared.max_step());

  SurfaceHit hit = map.nearest_surface(p);
  if (hit.clearance >= shared.safety_distance) return p;
  for (int it = 0; it < cfg.pushout_iters && hit.clearance < shared.safety_distance; ++it) {
    p = clamp_z(p + hit.normal * (shared.safety_distance - hit.clearance + 1e-6));
    hit = map.nearest_surface(p);
  }
  if (hit.clearance < 0.0) {
    // Still penetrating: jump to the surface plus the relaxed floor.
    p = clamp_z(p + hit.normal * (shared.relaxed_safety - hit.clearance + 1e-6));
    hit = map.nearest_surface(p);
  }

  if (prev && (p - *prev).norm() > shared.max_step() + 1e-9) {
    // Pushout broke the step cap: back off along prev -> p, preferring the
    // farthest point that is still clear enough.
    const Vec3 dir = (p - *prev).normalized();
    Vec3 fallback = *prev;
    double fallback_clear = map.signed_clearance(*prev);
    for (double f : {1.0, 0.75, 0.5, 0.25}) {
      const Vec3 q = *prev + dir * (f * shared.max_step());
      const double c = map.signed_clearance(q);
      if (c >= shared.relaxed_safety) return q;
      if (c >= 0.0 && fallback_clear < 0.0) fallback = q, fallback_clear = c;
    }
    return fallback;
  }
  if (hit.clearance < 0.0 && prev) return *prev;
  return p;
}

std::vector<bool> detect_low_vis_runs(const std::vector<double>& vis, const MuCoConfig& cfg) {
  std::vector<bool> mask(vis.size(), false);
  std::size_t i = 0;
  while (i < vis.size()) {
    if (!(vis[i] < cfg.circling_vis_threshold)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < vis.size() && vis[j] < cfg.circling_vis_threshold) ++j;
    if (j - i >= static_cast<std::size_t>(cfg.circling_run_length)) std::fill(mask.begin() + i, mask.begin() + j, true);
    i = j;
  }
  return mask;
}

namespace {

std::vector<double> frame_visibility(const std::vector<Vec3>& pts, const PedTrajectory& ped, const BoxMap& map,
                                     const VisibilityConfig& vis) {
  std::vector<double> v(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) v[i] = visibility_5ray(pts[i], ped.position(i), map, vis);
  return v;
}

bool hard_feasible(const std::vector<Vec3>& pts, const BoxMap& map, const SharedPlannerConfig& shared) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].z() < shared.z_min - 1e-9 || pts[i].z() > shared.z_max + 1e-9) return false;
    if (i > 0 && (pts[i] - pts[i - 1]).norm() > shared.max_step() + 1e-9) return false;
    if (map.signed_clearance(pts[i]) < 0.0) return false;
  }
  return true;
}

}  // namespace

DroneTrajectory plan_muco(const PedTrajectory& ped, const BoxMap& map, const SharedPlannerConfig& shared,
                          const MuCoConfig& cfg, const std::optional<DroneTrajectory>& init) {
  shared.validate();
  cfg.validate();
  if (ped.empty()) throw ValidationError("MuCO needs a non-empty pedestrian trajectory");
  const std::size_t n = ped.size();

  std::vector<Vec3> pts(n);
  if (init) {
    if (init->size() != n) throw ValidationError("MuCO initialization must align with the pedestrian");
    pts = init->positions();
  } else {
    const auto headings = ped_headings(ped, cfg.heading_window);
    for (std::size_t i = 0; i < n; ++i) pts[i] = behind_pose(ped.position(i), headings[i], shared);
  }
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = project_feasible(pts[i], i ? std::optional<Vec3>(pts[i - 1]) : std::nullopt, map, shared, cfg);
    if (map.signed_clearance(pts[i]) < shared.relaxed_safety)
      throw PlanningError("MuCO: initialization infeasible at frame " + std::to_string(i));
  }

  const LossModel model(ped, map, shared, cfg);
  std::vector<double> vis = frame_visibility(pts, ped, map, cfg.visibility);
  std::vector<bool> mask = detect_low_vis_runs(vis, cfg);
  MuCoEvaluation current = model.full(pts, mask);

  nlohmann::json history = nlohmann::json::array({current.objective});
  double lr = cfg.learning_rate;
  int iters = 0, accepted = 0, rejected = 0;
  bool converged = false;
  std::string stop_reason = "max_iters";
  double max_move = 0.0;

  std::vector<Vec3> cand(n);
  for (; iters < cfg.max_iters && n > 2; ++iters) {
    const auto g = gradient(model, pts, shared, cfg, mask);
    cand = pts;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      Vec3 step = -lr * g[i];
      const double len = step.norm();
      if (len > cfg.step_cap) step *= cfg.step_cap / len;
      Vec3 q = project_feasible(pts[i] + step, cand[i - 1], map, shared, cfg);
      if ((q - pts[i]).norm() > cfg.step_cap + 1e-12) q = pts[i];
      cand[i] = q;
    }
    MuCoEvaluation next;
    const bool feasible = hard_feasible(cand, map, shared);
    if (feasible) next = model.full(cand, mask);
    if (!feasible || next.objective > current.objective) {
      ++rejected;
      lr *= 0.5;
      if (lr < cfg.min_learning_rate) {
        converged = true;
        stop_reason = "step_size_exhausted";
        ++iters;
        break;
      }
      continue;
    }
    const double dl = current.objective - next.objective;
    for (std::size_t i = 0; i < n; ++i) max_move = std::max(max_move, (cand[i] - pts[i]).norm());
    pts.swap(cand);
    ++accepted;
    vis = frame_visibility(pts, ped, map, cfg.visibility);
    mask = detect_low_vis_runs(vis, cfg);
    current = model.full(pts, mask);
    history.push_back(current.objective);
    lr = std::min(cfg.learning_rate, lr * 1.25);
    if (dl < cfg.convergence_dL) {
      converged = true;
      stop_reason = "delta_loss";
      ++iters;
      break;
    }
  }

  DroneTrajectory traj = make_drone_trajectory(ped, pts, "muco");
  traj.visibility = vis;
  std::size_t masked = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  traj.diagnostics = {{"iterations", iters},
                      {"accepted_steps", accepted},
                      {"rejected_steps", rejected},
                      {"converged", converged},
                      {"stop_reason", stop_reason},
                      {"final_learning_rate", lr},
                      {"max_waypoint_move_m", max_move},
                      {"masked_frames", masked},
                      {"loss", current.breakdown.to_json()},
                      {"objective", current.objective},
                      {"loss_history", history}};
  traj.config = {{"shared", shared_config_to_json(shared)}, {"muco", muco_config_to_json(cfg)}};
  return traj;
}

}  // namespace cosplan
