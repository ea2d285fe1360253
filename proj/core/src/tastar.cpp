// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/tastar.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "cosplan/errors.hpp"

namespace cosplan {

void TaStarConfig::validate() const {
  if (!(voxel > 0.0)) throw ConfigError("TA* voxel size must be > 0");
  if (beam_width < 1) throw ConfigError("TA* beam width must be >= 1");
  if (!(corridor_margin > 0.0)) throw ConfigError("TA* corridor margin must be > 0");
  for (double w : {w_tracking, w_visibility, w_path, w_safety, w_smooth, w_altitude})
    if (!(w >= 0.0)) throw ConfigError("TA* weights must be >= 0");
  if (!(safety_influence >= 0.0)) throw ConfigError("TA* safety influence must be >= 0");
}

nlohmann::json tastar_config_to_json(const TaStarConfig& c) {
  nlohmann::json offsets = nlohmann::json::array();
  for (const auto& o : c.visibility.offsets) offsets.push_back({o.x(), o.y(), o.z()});
  return {{"voxel", c.voxel},
          {"beam_width", c.beam_width},
          {"corridor_margin", c.corridor_margin},
          {"weights",
           {{"tracking", c.w_tracking},
            {"visibility", c.w_visibility},
            {"path", c.w_path},
            {"safety", c.w_safety},
            {"smoothness", c.w_smooth},
            {"altitude", c.w_altitude}}},
          {"safety_influence", c.safety_influence},
          {"start_search_radius", c.start_search_radius},
          {"ray_offsets", offsets},
          {"ray_endpoint_margin", c.visibility.endpoint_margin}};
}

TaStarConfig tastar_config_from_json(const nlohmann::json& doc, TaStarConfig c) {
  c.voxel = doc.value("voxel", c.voxel);
  c.beam_width = doc.value("beam_width", c.beam_width);
  c.corridor_margin = doc.value("corridor_margin", c.corridor_margin);
  if (doc.contains("weights")) {
    const auto& w = doc["weights"];
    c.w_tracking = w.value("tracking", c.w_tracking);
    c.w_visibility = w.value("visibility", c.w_visibility);
    c.w_path = w.value("path", c.w_path);
    c.w_safety = w.value("safety", c.w_safety);
    c.w_smooth = w.value("smoothness", c.w_smooth);
    c.w_altitude = w.value("altitude", c.w_altitude);
  }
  c.safety_influence = doc.value("safety_influence", c.safety_influence);
  c.start_search_radius = doc.value("start_search_radius", c.start_search_radius);
  c.visibility.endpoint_margin = doc.value("ray_endpoint_margin", c.visibility.endpoint_margin);
  if (doc.contains("ray_offsets")) {
    c.visibility.offsets.clear();
    for (const auto& o : doc["ray_offsets"])
      c.visibility.offsets.emplace_back(o.at(0).get<double>(), o.at(1).get<double>(), o.at(2).get<double>());
  }
  c.validate();
  return c;
}

TaStarStage tastar_stage_cost(const Vec3& p, const Vec3* prev, const Vec3* prev2, const Vec3& target, double vis,
                              double clearance, const SharedPlannerConfig& shared, const TaStarConfig& cfg) {
  TaStarStage s;
  const double horiz = (p - target).head<2>().norm();
  s.tracking = cfg.w_tracking * (horiz - shared.behind_distance) * (horiz - shared.behind_distance);
  s.visibility = cfg.w_visibility * (1.0 - vis) * (1.0 - vis);
  s.altitude = cfg.w_altitude * (p.z() - shared.z_pref) * (p.z() - shared.z_pref);
  const double hinge = std::max(0.0, cfg.safety_influence - clearance);
  s.safety = cfg.w_safety * 0.5 * hinge * hinge;
  if (prev) {
    s.path = cfg.w_path * (p - *prev).norm();
    if (prev2) s.smooth = cfg.w_smooth * ((p - *prev) - (*prev - *prev2)).squaredNorm();
  }
  return s;
}

namespace {

struct VoxelKey {
  int x, y, z;
  friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
  friend auto operator<=>(const VoxelKey&, const VoxelKey&) = default;
};

std::uint64_t pack(const VoxelKey& k) {
  constexpr std::uint64_t kBias = 1u << 20;
  return ((static_cast<std::uint64_t>(k.x) + kBias) << 42) | ((static_cast<std::uint64_t>(k.y) + kBias) << 21) |
         (static_cast<std::uint64_t>(k.z) + kBias);
}

struct Eval {
  bool feasible = false;
  double clearance = 0.0;
  double vis = 0.0;
};

struct Node {
  VoxelKey key;
  std::int32_t parent;
  double g;
};

class FrameCache {
 public:
  FrameCache(const PedTrajectory& ped, const BoxMap& map, const SharedPlannerConfig& shared, const TaStarConfig& cfg)
      : ped_(ped), map_(map), shared_(shared), cfg_(cfg), caches_(ped.size()) {}

  Vec3 center(const VoxelKey& k) const { return Vec3(k.x, k.y, k.z) * cfg_.voxel; }

  const Eval& eval(std::size_t frame, const VoxelKey& k) {
    auto& cache = caches_[frame];
    auto [it, inserted] = cache.try_emplace(pack(k));
    if (!inserted) return it->second;
    ++evaluations_;
    Eval& e = it->second;
    const Vec3 c = center(k);
    const Vec3& target = ped_.position(frame);
    if (c.z() < shared_.z_min - 1e-9 || c.z() > shared_.z_max + 1e-9) return e;
    if ((c - target).head<2>().norm() > cfg_.corridor_margin) return e;
    e.clearance = map_.signed_clearance(c);
    if (e.clearance < shared_.safety_distance) return e;
    e.feasible = true;
    e.vis = visibility_5ray(c, target, map_, cfg_.visibility);
    return e;
  }

  [[nodiscard]] std::size_t evaluations() const { return evaluations_; }

 private:
  const PedTrajectory& ped_;
  const BoxMap& map_;
  const SharedPlannerConfig& shared_;
  const TaStarConfig& cfg_;
  std::vector<std::unordered_map<std::uint64_t, Eval>> caches_;
  std::size_t evaluations_ = 0;
};

}  // namespace

DroneTrajectory plan_tastar(const PedTrajectory& ped, const BoxMap& map, const SharedPlannerConfig& shared,
                            const TaStarConfig& cfg) {
  shared.validate();
  cfg.validate();
  if (ped.empty()) throw ValidationError("TA* needs a non-empty pedestrian trajectory");
  const std::size_t n = ped.size();
  const auto headings = ped_headings(ped);
  FrameCache cache(ped, map, shared, cfg);

  // Successor offsets: every neighbour in the 27-cell block that is
  // reachable within one frame at v_max.
  std::vector<VoxelKey> moves;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (std::sqrt(dx * dx + dy * dy + dz * dz) * cfg.voxel <= shared.max_step() + 1e-9) moves.push_back({dx, dy, dz});

  // Start: nearest feasible lattice point to the nominal behind pose.
  const Vec3 nominal = behind_pose(ped.position(0), headings[0], shared);
  const int reach = static_cast<int>(std::ceil(cfg.start_search_radius / cfg.voxel));
  const VoxelKey base{static_cast<int>(std::lround(nominal.x() / cfg.voxel)),
                      static_cast<int>(std::lround(nominal.y() / cfg.voxel)),
                      static_cast<int>(std::lround(nominal.z() / cfg.voxel))};
  std::vector<std::pair<double, VoxelKey>> candidates;
  for (int dz = -reach; dz <= reach; ++dz)
    for (int dy = -reach; dy <= reach; ++dy)
      for (int dx = -reach; dx <= reach; ++dx) {
        const VoxelKey k{base.x + dx, base.y + dy, base.z + dz};
        const double d = (cache.center(k) - nominal).norm();
        if (d <= cfg.start_search_radius + cfg.voxel) candidates.emplace_back(d, k);
      }
  std::sort(candidates.begin(), candidates.end());
  std::optional<VoxelKey> start;
  for (const auto& [d, k] : candidates)
    if (cache.eval(0, k).feasible) {
      start = k;
      break;
    }
  if (!start) throw PlanningError("TA*: no feasible start voxel near the behind pose");

  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(cfg.beam_width) * 8);
  {
    const Eval& e = cache.eval(0, *start);
    const Vec3 c = cache.center(*start);
    const double g =
        tastar_stage_cost(c, nullptr, nullptr, ped.position(0), e.vis, e.clearance, shared, cfg).total();
    nodes.push_back({*start, -1, g});
  }
  std::vector<std::int32_t> layer{0};
  std::size_t pruned = 0;

  std::unordered_map<std::uint64_t, std::int32_t> seen;
  for (std::size_t i = 1; i < n; ++i) {
    seen.clear();
    std::vector<std::int32_t> next;
    const Vec3& target = ped.position(i);
    for (std::int32_t ni : layer) {
      const Node node = nodes[ni];
      const Vec3 pc = cache.center(node.key);
      std::optional<Vec3> pp;
      if (node.parent >= 0) pp = cache.center(nodes[node.parent].key);
      for (const VoxelKey& m : moves) {
        const VoxelKey k{node.key.x + m.x, node.key.y + m.y, node.key.z + m.z};
        const Eval& e = cache.eval(i, k);
        if (!e.feasible) continue;
        const Vec3 c = cache.center(k);
        const double g =
            node.g + tastar_stage_cost(c, &pc, pp ? &*pp : nullptr, target, e.vis, e.clearance, shared, cfg).total();
        const std::uint64_t pk = pack(k);
        auto it = seen.find(pk);
        if (it == seen.end()) {
          seen.emplace(pk, static_cast<std::int32_t>(nodes.size()));
          next.push_back(static_cast<std::int32_t>(nodes.size()));
          nodes.push_back({k, ni, g});
        } else if (g < nodes[it->second].g) {
          nodes[it->second].g = g;
          nodes[it->second].parent = ni;
        }
      }
    }
    if (next.empty()) throw PlanningError("TA*: beam exhausted at frame " + std::to_string(i));
    std::sort(next.begin(), next.end(), [&](std::int32_t a, std::int32_t b) {
      if (nodes[a].g != nodes[b].g) return nodes[a].g < nodes[b].g;
      return nodes[a].key < nodes[b].key;
    });
    if (next.size() > static_cast<std::size_t>(cfg.beam_width)) {
      pruned += next.size() - static_cast<std::size_t>(cfg.beam_width);
      next.resize(static_cast<std::size_t>(cfg.beam_width));
    }
    layer = std::move(next);
  }

  const std::int32_t best = layer.front();
  std::vector<Vec3> pts(n);
  std::size_t i = n;
  for (std::int32_t k = best; k >= 0; k = nodes[k].parent) pts[--i] = cache.center(nodes[k].key);

  DroneTrajectory traj = make_drone_trajectory(ped, pts, "tastar");
  annotate_visibility(traj, ped, map, cfg.visibility);
  traj.diagnostics = {{"total_cost", nodes[best].g},
                      {"nodes_created", nodes.size()},
                      {"nodes_pruned_by_beam", pruned},
                      {"voxel_evaluations", cache.evaluations()},
                      {"start_offset_m", (cache.center(*start) - nominal).norm()}};
  traj.config = {{"shared", shared_config_to_json(shared)}, {"tastar", tastar_config_to_json(cfg)}};
  return traj;
}

}  // namespace cosplan
