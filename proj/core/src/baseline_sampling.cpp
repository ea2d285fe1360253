// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

// Seeded sampling planners: RRT*, PRM and a B-spline fit over the PRM path.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "baseline_internal.hpp"
#include "cosplan/rng.hpp"

namespace cosplan::baseline_detail {

namespace {

Vec3 sample_in(const Aabb& box, SplitMix64& rng) {
  return {rng.uniform(box.lo.x(), box.hi.x()), rng.uniform(box.lo.y(), box.hi.y()),
          rng.uniform(box.lo.z(), box.hi.z())};
}

std::vector<Vec3> finish(const Problem& pb, std::vector<Vec3> path) {
  return pb.cfg.shortcut_sampling ? shortcut(pb, path) : path;
}

}  // namespace

PathResult rrt_star(const Problem& pb, std::uint64_t seed) {
  PathResult res;
  if (pb.cfg.rrt_samples == 0) {
    res.failure = "rrt_star sample budget is zero";
    return res;
  }
  SplitMix64 rng(seed);
  std::vector<Vec3> pos{pb.start};
  std::vector<std::size_t> parent{0};
  std::vector<double> cost{0.0};
  std::vector<std::vector<std::size_t>> children(1);
  const double step = pb.cfg.rrt_step, radius = pb.cfg.rrt_rewire_radius;

  for (int s = 0; s < pb.cfg.rrt_samples; ++s) {
    const Vec3 target = rng.bernoulli(pb.cfg.goal_bias) ? pb.goal : sample_in(pb.bounds, rng);
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pos.size(); ++i) {
      const double d = (pos[i] - target).squaredNorm();
      if (d < best) best = d, nearest = i;
    }
    Vec3 q = target;
    const double dist = std::sqrt(best);
    if (dist > step) q = pos[nearest] + (target - pos[nearest]) * (step / dist);
    if (dist < 1e-9 || !pb.in_bounds(q) || !pb.point_free(q) || !pb.segment_free(pos[nearest], q)) continue;

    // Choose the cheapest parent among neighbours, then rewire them.
    std::vector<std::size_t> near;
    for (std::size_t i = 0; i < pos.size(); ++i)
      if ((pos[i] - q).norm() <= radius) near.push_back(i);
    std::size_t par = nearest;
    double c = cost[nearest] + (q - pos[nearest]).norm();
    for (std::size_t i : near) {
      const double ci = cost[i] + (q - pos[i]).norm();
      if (ci < c - 1e-12 && pb.segment_free(pos[i], q)) par = i, c = ci;
    }
    const std::size_t id = pos.size();
    pos.push_back(q);
    parent.push_back(par);
    cost.push_back(c);
    children.emplace_back();
    children[par].push_back(id);
    for (std::size_t i : near) {
      const double ci = c + (pos[i] - q).norm();
      if (ci < cost[i] - 1e-12 && pb.segment_free(q, pos[i])) {
        const double delta = cost[i] - ci;
        auto& siblings = children[parent[i]];
        siblings.erase(std::find(siblings.begin(), siblings.end(), i));
        parent[i] = id;
        children[id].push_back(i);
        // Propagate the improvement to the subtree.
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
          const std::size_t u = stack.back();
          stack.pop_back();
          cost[u] -= delta;
          stack.insert(stack.end(), children[u].begin(), children[u].end());
        }
      }
    }
  }

  std::optional<std::size_t> best_goal;
  for (std::size_t i = 0; i < pos.size(); ++i)
    if ((pos[i] - pb.goal).norm() <= pb.cfg.goal_radius + 1e-9 && (!best_goal || cost[i] < cost[*best_goal]))
      best_goal = i;
  res.diagnostics = {{"tree_nodes", pos.size()}, {"samples", pb.cfg.rrt_samples}};
  if (!best_goal) {
    res.failure = "rrt_star did not reach the goal region";
    return res;
  }
  std::vector<Vec3> path;
  for (std::size_t v = *best_goal;; v = parent[v]) {
    path.push_back(pos[v]);
    if (v == 0) break;
  }
  std::reverse(path.begin(), path.end());
  res.diagnostics["raw_cost"] = cost[*best_goal];
  res.path = finish(pb, std::move(path));
  return res;
}

namespace {

struct Roadmap {
  std::vector<Vec3> nodes;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;
};

// Node 0 is the start, node 1 the goal.
Roadmap build_roadmap(const Problem& pb, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Roadmap rm;
  rm.nodes = {pb.start, pb.goal};
  for (int s = 0; s < pb.cfg.prm_samples; ++s) {
    const Vec3 q = sample_in(pb.bounds, rng);
    if (pb.point_free(q)) rm.nodes.push_back(q);
  }
  const std::size_t n = rm.nodes.size();
  rm.adj.assign(n, {});
  const std::size_t k = static_cast<std::size_t>(pb.cfg.prm_k);
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < n; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) dist.emplace_back((rm.nodes[i] - rm.nodes[j]).norm(), j);
    const std::size_t take = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end());
    for (std::size_t t = 0; t < take; ++t) {
      const auto [d, j] = dist[t];
      const bool known = std::any_of(rm.adj[i].begin(), rm.adj[i].end(), [j = j](const auto& e) { return e.first == j; });
      if (known || !pb.segment_free(rm.nodes[i], rm.nodes[j])) continue;
      rm.adj[i].emplace_back(j, d);
      rm.adj[j].emplace_back(i, d);
    }
  }
  return rm;
}

std::optional<std::vector<Vec3>> shortest(const Roadmap& rm) {
  const std::size_t n = rm.nodes.size();
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, n);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[0] = 0.0;
  open.emplace(0.0, 0);
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (d > g[u]) continue;
    if (u == 1) break;
    for (const auto& [v, w] : rm.adj[u])
      if (g[u] + w < g[v]) {
        g[v] = g[u] + w;
        parent[v] = u;
        open.emplace(g[v], v);
      }
  }
  if (!std::isfinite(g[1])) return std::nullopt;
  std::vector<Vec3> path;
  for (std::size_t v = 1;; v = parent[v]) {
    path.push_back(rm.nodes[v]);
    if (v == 0) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

PathResult prm_raw(const Problem& pb, std::uint64_t seed) {
  PathResult res;
  if (pb.cfg.prm_samples == 0) {
    res.failure = "prm has no roadmap samples";
    return res;
  }
  const Roadmap rm = build_roadmap(pb, seed);
  std::size_t edges = 0;
  for (const auto& a : rm.adj) edges += a.size();
  res.diagnostics = {{"roadmap_nodes", rm.nodes.size()}, {"roadmap_edges", edges / 2}};
  auto path = shortest(rm);
  if (!path) {
    res.failure = "prm roadmap does not connect start and goal";
    return res;
  }
  res.path = std::move(*path);
  return res;
}

}  // namespace

PathResult prm(const Problem& pb, std::uint64_t seed) {
  PathResult res = prm_raw(pb, seed);
  if (res.failure.empty()) res.path = finish(pb, std::move(res.path));
  return res;
}

PathResult bspline_prm(const Problem& pb, std::uint64_t seed) {
  PathResult res = prm_raw(pb, seed);
  if (!res.failure.empty()) return res;
  // Control polygon: the shortcut PRM path with a control point roughly
  // every four path spacings, ends clamped by tripling the endpoints.
  const std::vector<Vec3> coarse = finish(pb, res.path);
  std::vector<Vec3> ctrl;
  for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
    const auto seg = straight_line(coarse[i], coarse[i + 1], pb.cfg.path_spacing * 4.0);
    ctrl.insert(ctrl.end(), seg.begin(), seg.end() - 1);
  }
  ctrl.push_back(coarse.back());
  ctrl.insert(ctrl.begin(), 2, ctrl.front());
  ctrl.insert(ctrl.end(), 2, ctrl.back());

  std::vector<Vec3> curve;
  constexpr int kPerSpan = 6;
  for (std::size_t i = 0; i + 3 < ctrl.size(); ++i)
    for (int s = 0; s < kPerSpan; ++s) {
      const double t = static_cast<double>(s) / kPerSpan;
      const double t2 = t * t, t3 = t2 * t;
      const double b0 = (1 - t) * (1 - t) * (1 - t) / 6.0;
      const double b1 = (3 * t3 - 6 * t2 + 4) / 6.0;
      const double b2 = (-3 * t3 + 3 * t2 + 3 * t + 1) / 6.0;
      const double b3 = t3 / 6.0;
      curve.push_back(b0 * ctrl[i] + b1 * ctrl[i + 1] + b2 * ctrl[i + 2] + b3 * ctrl[i + 3]);
    }
  curve.push_back(ctrl.back());

  bool clear = true;
  for (std::size_t i = 0; i + 1 < curve.size() && clear; ++i) clear = pb.segment_free(curve[i], curve[i + 1]);
  res.diagnostics["spline_fallback"] = !clear;
  res.path = clear ? curve : coarse;
  return res;
}

}  // namespace cosplan::baseline_detail
