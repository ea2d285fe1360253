// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "cosplan/errors.hpp"

namespace cosplan {

namespace {

// JSON has no infinity; an obstacle-free clearance is written as null.
nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double number_or_inf(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || doc[key].is_null()) return std::numeric_limits<double>::infinity();
  return doc[key].get<double>();
}

}  // namespace

nlohmann::json MetricsReport::to_json() const {
  return {{"path_length", path_length},
          {"avg_target_distance", avg_target_distance},
          {"avg_visibility", avg_visibility},
          {"blocked_fraction", blocked_fraction},
          {"accel_rms", accel_rms},
          {"jerk_rms", jerk_rms},
          {"collision_fraction", collision_fraction},
          {"min_signed_clearance", finite_or_null(min_signed_clearance)},
          {"planning_time_ms", planning_time_ms},
          {"jerk_undefined", jerk_undefined}};
}

MetricsReport MetricsReport::from_json(const nlohmann::json& doc) {
  MetricsReport m;
  m.path_length = doc.at("path_length").get<double>();
  m.avg_target_distance = doc.at("avg_target_distance").get<double>();
  m.avg_visibility = doc.at("avg_visibility").get<double>();
  m.blocked_fraction = doc.at("blocked_fraction").get<double>();
  m.accel_rms = doc.at("accel_rms").get<double>();
  m.jerk_rms = doc.at("jerk_rms").get<double>();
  m.collision_fraction = doc.at("collision_fraction").get<double>();
  m.min_signed_clearance = number_or_inf(doc, "min_signed_clearance");
  m.planning_time_ms = doc.value("planning_time_ms", 0.0);
  m.jerk_undefined = doc.value("jerk_undefined", false);
  return m;
}

MetricsReport trajectory_metrics(const DroneTrajectory& traj, const PedTrajectory& ped, const BoxMap& map,
                                 const VisibilityConfig& vis) {
  if (traj.size() != ped.size()) throw ValidationError("metrics need a trajectory aligned with the pedestrian");
  MetricsReport m;
  m.planning_time_ms = traj.planning_ms;
  const std::size_t n = traj.size();
  if (n == 0) {
    m.jerk_undefined = true;
    m.min_signed_clearance = std::numeric_limits<double>::infinity();
    return m;
  }
  const double dt = ped.dt;
  const auto p = traj.positions();

  double dist = 0.0, v_sum = 0.0;
  std::size_t blocked = 0, collisions = 0;
  m.min_signed_clearance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) m.path_length += (p[i] - p[i - 1]).norm();
    dist += (p[i] - ped.position(i)).norm();
    const double v = visibility_5ray(p[i], ped.position(i), map, vis);
    v_sum += v;
    if (v < 1.0) ++blocked;
    const double c = map.signed_clearance(p[i]);
    if (c < 0.0) ++collisions;
    m.min_signed_clearance = std::min(m.min_signed_clearance, c);
  }
  const double dn = static_cast<double>(n);
  m.avg_target_distance = dist / dn;
  m.avg_visibility = v_sum / dn;
  m.blocked_fraction = static_cast<double>(blocked) / dn;
  m.collision_fraction = static_cast<double>(collisions) / dn;

  if (n >= 3) {
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) s += ((p[i + 1] - 2.0 * p[i] + p[i - 1]) / (dt * dt)).squaredNorm();
    m.accel_rms = std::sqrt(s / static_cast<double>(n - 2));
  }
  if (n >= 4) {
    double s = 0.0;
    for (std::size_t i = 1; i + 2 < n; ++i)
      s += ((p[i + 2] - 3.0 * p[i + 1] + 3.0 * p[i] - p[i - 1]) / (dt * dt * dt)).squaredNorm();
    m.jerk_rms = std::sqrt(s / static_cast<double>(n - 3));
  } else {
    m.jerk_undefined = true;
  }
  return m;
}

double smoothness_score(double accel_rms, double jerk_rms, const QualityThresholds& t) {
  return std::exp(-0.5 * (accel_rms / t.accel_max + jerk_rms / t.jerk_max));
}

double safety_score(double collision_fraction, double min_clearance) {
  return (1.0 - collision_fraction) * std::clamp(min_clearance / 5.0, 0.0, 1.0);
}

double relative_delta(double a, double b) { return b == 0.0 ? 0.0 : (a - b) / b; }

MetricsReport PlannerBatch::mean() const {
  MetricsReport m;
  std::size_t k = 0;
  for (const auto& s : scenarios) {
    if (s.failed) continue;
    const auto& r = s.metrics;
    m.path_length += r.path_length;
    m.avg_target_distance += r.avg_target_distance;
    m.avg_visibility += r.avg_visibility;
    m.blocked_fraction += r.blocked_fraction;
    m.accel_rms += r.accel_rms;
    m.jerk_rms += r.jerk_rms;
    m.collision_fraction += r.collision_fraction;
    // Obstacle-free scenarios contribute the saturation distance of the
    // safety score rather than infinity.
    m.min_signed_clearance += std::isfinite(r.min_signed_clearance) ? r.min_signed_clearance : 5.0;
    m.planning_time_ms += r.planning_time_ms;
    ++k;
  }
  if (k == 0) return m;
  const double d = static_cast<double>(k);
  m.path_length /= d;
  m.avg_target_distance /= d;
  m.avg_visibility /= d;
  m.blocked_fraction /= d;
  m.accel_rms /= d;
  m.jerk_rms /= d;
  m.collision_fraction /= d;
  m.min_signed_clearance /= d;
  m.planning_time_ms /= d;
  return m;
}

nlohmann::json FourAxisScore::to_json() const {
  return {{"visibility", visibility},
          {"path_efficiency", path_efficiency},
          {"smoothness", smoothness},
          {"safety", safety},
          {"mean", mean}};
}

std::map<std::string, FourAxisScore> four_axis_scores(const std::vector<PlannerBatch>& batches) {
  if (batches.empty()) throw ValidationError("four-axis scoring needs at least one planner batch");
  std::map<std::string, MetricsReport> means;
  for (const auto& b : batches) {
    const bool any = std::any_of(b.scenarios.begin(), b.scenarios.end(), [](const auto& s) { return !s.failed; });
    if (!any) throw ValidationError("planner '" + b.planner + "' has no successful scenarios");
    means[b.planner] = b.mean();
  }
  double shortest = std::numeric_limits<double>::infinity();
  for (const auto& [name, m] : means) shortest = std::min(shortest, m.path_length);

  std::map<std::string, FourAxisScore> out;
  for (const auto& [name, m] : means) {
    FourAxisScore s;
    s.visibility = m.avg_visibility;
    s.path_efficiency = m.path_length > 0.0 ? shortest / m.path_length : 1.0;
    s.smoothness = smoothness_score(m.accel_rms, m.jerk_rms);
    s.safety = safety_score(m.collision_fraction, m.min_signed_clearance);
    s.mean = (s.visibility + s.path_efficiency + s.smoothness + s.safety) / 4.0;
    out[name] = s;
  }
  return out;
}

std::string four_axis_csv(const std::map<std::string, FourAxisScore>& scores) {
  std::ostringstream os;
  os.precision(6);
  os << "planner,visibility,path_efficiency,smoothness,safety,mean\n";
  for (const auto& [name, s] : scores)
    os << name << ',' << s.visibility << ',' << s.path_efficiency << ',' << s.smoothness << ',' << s.safety << ','
       << s.mean << '\n';
  return os.str();
}

std::map<std::string, double> weighted_scores(const std::vector<PlannerBatch>& batches,
                                              const std::map<std::string, double>& weights) {
  if (batches.empty()) throw ValidationError("weighted scoring needs at least one planner batch");
  struct Column {
    const char* name;
    bool higher_is_better;
    double (*get)(const MetricsReport&);
  };
  static const Column kColumns[] = {
      {"visibility", true, [](const MetricsReport& m) { return m.avg_visibility; }},
      {"blocked_los", false, [](const MetricsReport& m) { return m.blocked_fraction; }},
      {"collision", false, [](const MetricsReport& m) { return m.collision_fraction; }},
      {"path_length", false, [](const MetricsReport& m) { return m.path_length; }},
      {"jerk", false, [](const MetricsReport& m) { return m.jerk_rms; }},
      {"clearance", true, [](const MetricsReport& m) { return m.min_signed_clearance; }},
  };
  std::vector<MetricsReport> means;
  for (const auto& b : batches) means.push_back(b.mean());

  std::map<std::string, double> out;
  double wsum = 0.0;
  for (const auto& col : kColumns) {
    const auto it = weights.find(col.name);
    const double w = it == weights.end() ? 1.0 : it->second;
    wsum += w;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& m : means) lo = std::min(lo, col.get(m)), hi = std::max(hi, col.get(m));
    for (std::size_t i = 0; i < batches.size(); ++i) {
      double v = hi > lo ? (col.get(means[i]) - lo) / (hi - lo) : 1.0;
      if (!col.higher_is_better && hi > lo) v = 1.0 - v;
      out[batches[i].planner] += w * v;
    }
  }
  if (wsum > 0.0)
    for (auto& [name, v] : out) v /= wsum;
  return out;
}

double Comparison::win_rate(const std::string& key) const {
  const auto it = wins.find(key);
  return scenarios == 0 || it == wins.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(scenarios);
}

nlohmann::json Comparison::to_json() const {
  nlohmann::json d = nlohmann::json::object(), w = nlohmann::json::object();
  for (const auto& [k, v] : deltas)
    d[k] = {{"mean_a", v.mean_a}, {"mean_b", v.mean_b}, {"delta", v.delta}, {"relative_pct", 100.0 * v.relative}};
  for (const auto& [k, v] : wins) w[k] = {{"count", v}, {"rate", win_rate(k)}};
  return {{"planner_a", planner_a}, {"planner_b", planner_b}, {"scenarios", scenarios}, {"deltas", d}, {"wins", w}};
}

Comparison compare_planners(const PlannerBatch& a, const PlannerBatch& b) {
  std::map<std::string, const ScenarioMetrics*> by_id;
  for (const auto& s : b.scenarios) by_id[s.scenario_id] = &s;
  std::set<std::string> ids_a;
  for (const auto& s : a.scenarios) ids_a.insert(s.scenario_id);
  if (ids_a.size() != by_id.size() || a.scenarios.size() != b.scenarios.size())
    throw ValidationError("compared batches must share scenario ids");
  for (const auto& id : ids_a)
    if (!by_id.count(id)) throw ValidationError("scenario '" + id + "' missing from planner '" + b.planner + "'");

  Comparison c;
  c.planner_a = a.planner;
  c.planner_b = b.planner;
  c.scenarios = a.scenarios.size();
  for (const char* key : {"visibility_higher", "path_shorter", "jerk_lower", "clearance_larger", "both_collision_free"})
    c.wins[key] = 0;
  for (const auto& sa : a.scenarios) {
    const auto& sb = *by_id[sa.scenario_id];
    if (sa.failed || sb.failed) continue;
    const auto &ma = sa.metrics, &mb = sb.metrics;
    if (ma.avg_visibility > mb.avg_visibility) ++c.wins["visibility_higher"];
    if (ma.path_length < mb.path_length) ++c.wins["path_shorter"];
    if (ma.jerk_rms < mb.jerk_rms) ++c.wins["jerk_lower"];
    if (ma.min_signed_clearance > mb.min_signed_clearance) ++c.wins["clearance_larger"];
    if (ma.collision_fraction == 0.0 && mb.collision_fraction == 0.0) ++c.wins["both_collision_free"];
  }
  const MetricsReport ma = a.mean(), mb = b.mean();
  auto add = [&](const char* key, double va, double vb) { c.deltas[key] = {va, vb, va - vb, relative_delta(va, vb)}; };
  add("avg_visibility", ma.avg_visibility, mb.avg_visibility);
  add("blocked_fraction", ma.blocked_fraction, mb.blocked_fraction);
  add("path_length", ma.path_length, mb.path_length);
  add("avg_target_distance", ma.avg_target_distance, mb.avg_target_distance);
  add("accel_rms", ma.accel_rms, mb.accel_rms);
  add("jerk_rms", ma.jerk_rms, mb.jerk_rms);
  add("collision_fraction", ma.collision_fraction, mb.collision_fraction);
  add("min_signed_clearance", ma.min_signed_clearance, mb.min_signed_clearance);
  add("planning_time_ms", ma.planning_time_ms, mb.planning_time_ms);
  return c;
}

std::string_view funnel_outcome_name(FunnelOutcome o) {
  switch (o) {
    case FunnelOutcome::kPlannerFailure: return "planner_failure";
    case FunnelOutcome::kRejectedVisibility: return "rejected_visibility";
    case FunnelOutcome::kRejectedSmoothness: return "rejected_smoothness";
    case FunnelOutcome::kFlaggedReview: return "flagged_review";
    case FunnelOutcome::kPassed: return "passed";
  }
  return "unknown";
}

std::size_t FunnelReport::count(FunnelOutcome o) const {
  const auto it = counts.find(o);
  return it == counts.end() ? 0 : it->second;
}

nlohmann::json FunnelReport::to_json() const {
  nlohmann::json stages = nlohmann::json::array();
  std::size_t remaining = decisions.size();
  stages.push_back({{"stage", "planned"}, {"remaining", remaining}, {"removed", 0}});
  for (FunnelOutcome o : {FunnelOutcome::kPlannerFailure, FunnelOutcome::kRejectedVisibility,
                          FunnelOutcome::kRejectedSmoothness}) {
    remaining -= count(o);
    stages.push_back({{"stage", funnel_outcome_name(o)}, {"removed", count(o)}, {"remaining", remaining}});
  }
  nlohmann::json items = nlohmann::json::array();
  for (const auto& [id, o] : decisions) items.push_back({{"scenario_id", id}, {"outcome", funnel_outcome_name(o)}});
  nlohmann::json c = nlohmann::json::object();
  for (FunnelOutcome o : {FunnelOutcome::kPlannerFailure, FunnelOutcome::kRejectedVisibility,
                          FunnelOutcome::kRejectedSmoothness, FunnelOutcome::kFlaggedReview, FunnelOutcome::kPassed})
    c[std::string(funnel_outcome_name(o))] = count(o);
  return {{"total", decisions.size()}, {"counts", c}, {"funnel", stages}, {"items", items}};
}

FunnelReport quality_filter(const std::vector<ScenarioMetrics>& items, const QualityThresholds& t) {
  FunnelReport r;
  for (const auto& s : items) {
    const auto& m = s.metrics;
    FunnelOutcome o = FunnelOutcome::kPassed;
    if (s.failed)
      o = FunnelOutcome::kPlannerFailure;
    else if (m.avg_visibility < t.vis_prefilter)
      o = FunnelOutcome::kRejectedVisibility;
    else if (m.accel_rms > t.accel_max || m.jerk_rms > t.jerk_max)
      o = FunnelOutcome::kRejectedSmoothness;
    else if (smoothness_score(m.accel_rms, m.jerk_rms, t) < t.smoothness_review)
      o = FunnelOutcome::kFlaggedReview;
    r.decisions.emplace_back(s.scenario_id, o);
    ++r.counts[o];
  }
  return r;
}

}  // namespace cosplan
