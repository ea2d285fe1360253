// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

// Grid A* family and the visibility-graph search.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>
#include <unordered_map>

#include "baseline_internal.hpp"

namespace cosplan::baseline_detail {

namespace {

struct Key {
  int x, y, z;
};

std::uint64_t pack(const Key& k) {
  constexpr std::uint64_t kBias = 1u << 20;
  return ((static_cast<std::uint64_t>(k.x) + kBias) << 42) | ((static_cast<std::uint64_t>(k.y) + kBias) << 21) |
         (static_cast<std::uint64_t>(k.z) + kBias);
}

struct OpenEntry {
  double f;
  double g;
  std::uint64_t seq;
  std::uint64_t key;
  bool operator>(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    if (g != o.g) return g < o.g;  // deeper first on ties
    return seq > o.seq;
  }
};

struct NodeInfo {
  Key key;
  double g;
  std::uint64_t parent;  // == own key for the root
  bool closed = false;
};

}  // namespace

PathResult search_grid(const Problem& pb, double epsilon, bool any_angle) {
  const double h = pb.cfg.voxel;
  const Vec3 origin = pb.start;  // lattice aligned with the start anchor
  auto center = [&](const Key& k) { return Vec3(origin + Vec3(k.x, k.y, k.z) * h); };

  std::unordered_map<std::uint64_t, bool> free_cache;
  auto free = [&](const Key& k) {
    auto [it, inserted] = free_cache.try_emplace(pack(k), false);
    if (inserted) {
      const Vec3 c = center(k);
      it->second = pb.in_bounds(c) && pb.point_free(c);
    }
    return it->second;
  };

  std::unordered_map<std::uint64_t, NodeInfo> nodes;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
  std::uint64_t seq = 0;
  const Key root{0, 0, 0};
  const std::uint64_t root_key = pack(root);
  nodes[root_key] = {root, 0.0, root_key};
  open.push({epsilon * (pb.start - pb.goal).norm(), 0.0, seq++, root_key});

  std::size_t expansions = 0;
  std::optional<std::uint64_t> reached;
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    NodeInfo& cur = nodes[top.key];
    if (cur.closed || top.g > cur.g) continue;
    cur.closed = true;
    const Vec3 cp = center(cur.key);
    if ((cp - pb.goal).norm() <= pb.cfg.goal_radius + 1e-9) {
      reached = top.key;
      break;
    }
    if (++expansions > pb.cfg.max_expansions) break;
    const NodeInfo parent = nodes[cur.parent];
    const Key ck = cur.key;
    const double cg = cur.g;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const Key nk{ck.x + dx, ck.y + dy, ck.z + dz};
          if (!free(nk)) continue;
          const Vec3 np = center(nk);
          double g = cg + (np - cp).norm();
          std::uint64_t par = top.key;
          if (any_angle && top.key != root_key) {
            const Vec3 pp = center(parent.key);
            if (pb.segment_free(pp, np)) {
              g = parent.g + (np - pp).norm();
              par = cur.parent;
            }
          }
          const std::uint64_t pk = pack(nk);
          auto it = nodes.find(pk);
          if (it != nodes.end() && (it->second.closed || it->second.g <= g)) continue;
          nodes[pk] = {nk, g, par};
          open.push({g + epsilon * (np - pb.goal).norm(), g, seq++, pk});
        }
  }

  PathResult res;
  res.diagnostics = {{"expansions", expansions}, {"epsilon", epsilon}, {"any_angle", any_angle}};
  if (!reached) {
    res.failure = expansions > pb.cfg.max_expansions ? "search budget exhausted" : "no path in the voxel grid";
    return res;
  }
  for (std::uint64_t k = *reached;; k = nodes[k].parent) {
    res.path.push_back(center(nodes[k].key));
    if (k == root_key) break;
  }
  std::reverse(res.path.begin(), res.path.end());
  if ((res.path.back() - pb.goal).norm() > 1e-9 && pb.segment_free(res.path.back(), pb.goal))
    res.path.push_back(pb.goal);
  return res;
}

PathResult search_visibility_graph(const Problem& pb) {
  constexpr std::size_t kMaxNodes = 4000;
  const double m = pb.cfg.clearance_margin;
  std::vector<Vec3> nodes{pb.start, pb.goal};
  const Aabb region = pb.bounds.inflated(m);
  for (const auto& box : pb.map.boxes()) {
    const Aabb& a = box.aabb;
    if ((a.hi.array() < region.lo.array()).any() || (a.lo.array() > region.hi.array()).any()) continue;
    const Aabb g = a.inflated(m * 1.05);
    // Corner columns at the box top and bottom, plus at the start and goal
    // altitudes so tall boxes can be passed sideways.
    const double levels[4] = {g.lo.z(), g.hi.z(), pb.start.z(), pb.goal.z()};
    for (int c = 0; c < 16 && nodes.size() < kMaxNodes; ++c) {
      const double z = levels[c >> 2];
      if ((c >> 2) >= 2 && (z < g.lo.z() || z > g.hi.z())) continue;
      if ((c >> 2) == 3 && pb.goal.z() == pb.start.z()) continue;
      const Vec3 q((c & 1) ? g.hi.x() : g.lo.x(), (c & 2) ? g.hi.y() : g.lo.y(), z);
      if (pb.in_bounds(q) && pb.point_free(q)) nodes.push_back(q);
    }
  }
  const std::size_t n = nodes.size();

  // Lazy A*: edges are checked only when their tail is expanded.
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, n);
  std::vector<bool> closed(n, false);
  using Entry = std::tuple<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[0] = 0.0;
  open.emplace((pb.start - pb.goal).norm(), 0);
  std::size_t expansions = 0, edge_checks = 0;
  while (!open.empty()) {
    const auto [f, u] = open.top();
    open.pop();
    if (closed[u]) continue;
    closed[u] = true;
    if (u == 1) break;
    ++expansions;
    for (std::size_t v = 0; v < n; ++v) {
      if (closed[v]) continue;
      const double cand = g[u] + (nodes[v] - nodes[u]).norm();
      if (cand >= g[v]) continue;
      ++edge_checks;
      if (!pb.segment_free(nodes[u], nodes[v])) continue;
      g[v] = cand;
      parent[v] = u;
      open.emplace(cand + (nodes[v] - pb.goal).norm(), v);
    }
  }
  PathResult res;
  res.diagnostics = {{"graph_nodes", n}, {"expansions", expansions}, {"edge_checks", edge_checks}};
  if (!closed[1]) {
    res.failure = "goal not connected in the visibility graph";
    return res;
  }
  for (std::size_t v = 1; v != n; v = parent[v]) {
    res.path.push_back(nodes[v]);
    if (v == 0) break;
  }
  std::reverse(res.path.begin(), res.path.end());
  return res;
}

}  // namespace cosplan::baseline_detail
