// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/pedplan.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <queue>

#include "cosplan/errors.hpp"
#include "cosplan/rng.hpp"

namespace cosplan {

void SpeedModel::validate() const {
  if (!(v_min <= v_max)) throw ConfigError("speed clip range must be ordered");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must lie in [0, 1)");
  if (!(v_floor > 0.0)) throw ConfigError("v_floor must be > 0");
  if (!(eps_kappa > 0.0)) throw ConfigError("eps_kappa must be > 0");
}

PedTrajectory make_ped_trajectory(const std::vector<Vec3>& positions, double dt, std::string id) {
  PedTrajectory traj;
  traj.id = std::move(id);
  traj.dt = dt;
  const std::size_t n = positions.size();
  for (std::size_t i = 0; i < n; ++i) {
    PedWaypoint w;
    w.t = static_cast<double>(i) * dt;
    w.p = positions[i];
    if (n > 1) {
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = i == 0 ? 1 : i;
      w.v = (positions[b] - positions[a]).norm() / dt;
    }
    traj.waypoints.push_back(w);
  }
  return traj;
}

std::pair<Cell, Cell> sample_endpoints(const OccupancyGrid& grid, double d_min, double d_max, std::uint64_t seed,
                                       int retries) {
  if (!(d_min >= 0.0 && d_min <= d_max)) throw ConfigError("endpoint distance range must satisfy 0 <= d_min <= d_max");
  const GridSpec& s = grid.spec;
  std::vector<Cell> free_cells;
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x)
      if (grid.component_labels[s.index({x, y})] >= 0) free_cells.push_back({x, y});
  if (free_cells.empty()) throw SamplingError("no free cells to sample from");

  SplitMix64 rng(seed);
  const int reach = static_cast<int>(std::ceil(d_max / s.resolution)) + 1;
  std::vector<Cell> candidates;
  for (int round = 0; round < std::max(1, retries); ++round) {
    const Cell start = free_cells[rng.below(free_cells.size())];
    const auto label = grid.component_labels[s.index(start)];
    const Vec2 ps = s.cell_center(start);
    candidates.clear();
    for (int y = std::max(0, start.y - reach); y <= std::min(s.height - 1, start.y + reach); ++y)
      for (int x = std::max(0, start.x - reach); x <= std::min(s.width - 1, start.x + reach); ++x) {
        if (grid.component_labels[s.index({x, y})] != label) continue;
        const double d = (s.cell_center({x, y}) - ps).norm();
        if (d >= d_min && d <= d_max) candidates.push_back({x, y});
      }
    if (!candidates.empty()) return {start, candidates[rng.below(candidates.size())]};
  }
  throw SamplingError("no endpoint pair within [" + std::to_string(d_min) + ", " + std::to_string(d_max) +
                      "] m after " + std::to_string(retries) + " rounds");
}

GridPath plan_astar_2d(const OccupancyGrid& grid, const Cell& start, const Cell& goal) {
  const GridSpec& s = grid.spec;
  if (!grid.is_free(start) || !grid.is_free(goal)) throw PlanningError("A* endpoints must be free cells");
  constexpr double kDiag = 1.4142135623730951;
  auto h = [&](const Cell& c) {
    const int dx = std::abs(c.x - goal.x), dy = std::abs(c.y - goal.y);
    return static_cast<double>(std::max(dx, dy)) + (kDiag - 1.0) * std::min(dx, dy);
  };

  struct Entry {
    double f;
    double g;
    std::uint64_t seq;
    std::size_t idx;
  };
  // Smallest f first; ties go to larger g, then to earlier insertion.
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.seq > b.seq;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);
  const std::size_t n = s.cell_count();
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, SIZE_MAX);
  std::vector<std::uint8_t> closed(n, 0);
  std::uint64_t seq = 0;

  const std::size_t si = s.index(start), gi = s.index(goal);
  g[si] = 0.0;
  open.push({h(start), 0.0, seq++, si});
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    if (closed[e.idx]) continue;
    closed[e.idx] = 1;
    if (e.idx == gi) break;
    const Cell c{static_cast<int>(e.idx % s.width), static_cast<int>(e.idx / s.width)};
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const Cell nb{c.x + dx, c.y + dy};
        if (!grid.is_free(nb)) continue;
        if (dx != 0 && dy != 0 && (!grid.is_free({c.x + dx, c.y}) || !grid.is_free({c.x, c.y + dy}))) continue;
        const std::size_t ni = s.index(nb);
        if (closed[ni]) continue;
        const double ng = e.g + ((dx != 0 && dy != 0) ? kDiag : 1.0);
        if (ng < g[ni]) {
          g[ni] = ng;
          parent[ni] = e.idx;
          open.push({ng + h(nb), ng, seq++, ni});
        }
      }
  }
  if (!closed[gi]) throw PlanningError("goal unreachable from start");

  GridPath out;
  out.cost = g[gi];
  for (std::size_t i = gi; i != SIZE_MAX; i = parent[i])
    out.cells.push_back({static_cast<int>(i % s.width), static_cast<int>(i / s.width)});
  std::reverse(out.cells.begin(), out.cells.end());
  return out;
}

double menger_curvature(const Vec3& prev, const Vec3& p, const Vec3& next, double eps) {
  const Vec3 a = next - p;
  const Vec3 b = prev - p;
  const double denom = a.norm() * b.norm() * (next - prev).norm();
  if (denom < eps) return 0.0;
  return 2.0 * a.cross(b).norm() / std::max(denom, eps);
}

double curvature_speed(double kappa, double noise, const SpeedModel& m) {
  const double v = m.v_cruise / (1.0 + m.alpha * kappa) * (1.0 + m.beta * noise);
  return std::clamp(v, m.v_min, m.v_max);
}

PedTrajectory resample_variable_speed(const std::vector<Cell>& path, const GridSpec& spec, const SpeedModel& model,
                                      double dt, std::uint64_t seed) {
  model.validate();
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (path.empty()) throw ValidationError("cannot resample an empty path");

  PedTrajectory traj;
  traj.dt = dt;
  traj.start = path.front();
  traj.goal = path.back();
  traj.cells = path;

  const std::size_t n = path.size();
  std::vector<Vec3> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 c = spec.cell_center(path[i]);
    pts[i] = Vec3(c.x(), c.y(), spec.ground_z);
  }

  SplitMix64 rng(seed);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || i + 1 == n) {
      v[i] = curvature_speed(0.0, 0.0, model);
    } else {
      const double kappa = menger_curvature(pts[i - 1], pts[i], pts[i + 1], model.eps_kappa);
      v[i] = curvature_speed(kappa, rng.uniform(-1.0, 1.0), model);
    }
  }

  std::vector<double> t(n, 0.0);
  bool floored = false;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double mean = 0.5 * (v[i] + v[i + 1]);
    if (mean < model.v_floor) {
      mean = model.v_floor;
      floored = true;
    }
    t[i + 1] = t[i] + (pts[i + 1] - pts[i]).norm() / mean;
  }
  if (floored) traj.warnings.push_back("segment mean speed floored at v_floor");

  const double total = t.back();
  const auto samples = static_cast<std::size_t>(std::llround(total / dt)) + 1;
  traj.waypoints.reserve(samples);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double tk = static_cast<double>(k) * dt;
    PedWaypoint w;
    w.t = tk;
    if (tk >= total || n == 1) {
      w.p = pts.back();
      w.v = v.back();
    } else {
      while (seg + 2 < n && t[seg + 1] <= tk) ++seg;
      const double span = t[seg + 1] - t[seg];
      const double u = span > 0.0 ? (tk - t[seg]) / span : 0.0;
      w.p = pts[seg] + u * (pts[seg + 1] - pts[seg]);
      w.v = v[seg] + u * (v[seg + 1] - v[seg]);
    }
    traj.waypoints.push_back(w);
  }
  return traj;
}

GridSpec derive_grid_spec(const BoxMap& map, const RoiPolygon* roi, const PedPlanConfig& cfg) {
  if (cfg.grid.width > 0 && cfg.grid.height > 0) return cfg.grid;
  Vec2 lo(std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  if (!map.empty()) {
    lo = lo.cwiseMin(map.bounds().lo.head<2>());
    hi = hi.cwiseMax(map.bounds().hi.head<2>());
  }
  if (roi) {
    for (const auto& p : roi->outer) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  if (!lo.allFinite() || !hi.allFinite()) throw ConfigError("cannot derive a grid from an empty map without an ROI");
  GridSpec s = GridSpec::covering(lo, hi, cfg.grid.resolution, cfg.grid_margin);
  s.ground_z = cfg.grid.ground_z;
  s.human_height = cfg.grid.human_height;
  s.inflation_radius = cfg.grid.inflation_radius;
  return s;
}

std::vector<PedTrajectory> plan_pedestrians(const OccupancyGrid& grid, int n, std::uint64_t seed,
                                            const PedPlanConfig& cfg, PedPlanReport* report) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::time_point a) { return std::chrono::duration<double, std::milli>(clock::now() - a).count(); };
  std::vector<PedTrajectory> out;
  PedPlanReport local;
  PedPlanReport& r = report ? *report : local;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
    auto t0 = clock::now();
    std::pair<Cell, Cell> ends;
    try {
      ends = sample_endpoints(grid, cfg.d_min, cfg.d_max, s, cfg.retries);
    } catch (const SamplingError&) {
      r.sampling_ms += ms(t0);
      ++r.sampling_failures;
      continue;
    }
    r.sampling_ms += ms(t0);
    t0 = clock::now();
    const GridPath path = plan_astar_2d(grid, ends.first, ends.second);
    r.astar_ms += ms(t0);
    t0 = clock::now();
    PedTrajectory traj = resample_variable_speed(path.cells, grid.spec, cfg.speed, cfg.dt, derive_seed(s, 1));
    r.resample_ms += ms(t0);
    char id[32];
    std::snprintf(id, sizeof id, "path_%03d", i);
    traj.id = id;
    out.push_back(std::move(traj));
    ++r.paths_planned;
  }
  return out;
}

PedPlanRun plan_pedestrians_on_map(const BoxMap& map, const RoiPolygon* roi, int n, std::uint64_t seed,
                                   const PedPlanConfig& cfg) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::time_point a) { return std::chrono::duration<double, std::milli>(clock::now() - a).count(); };
  PedPlanRun run;
  auto t0 = clock::now();
  OccupancyGrid grid = build_occupancy(map, derive_grid_spec(map, roi, cfg), cfg.max_cells);
  run.report.grid_ms = ms(t0);
  t0 = clock::now();
  run.grid = free_space_regions(std::move(grid), roi, cfg.min_component_cells);
  run.report.regions_ms = ms(t0);
  run.report.grid_width = run.grid.spec.width;
  run.report.grid_height = run.grid.spec.height;
  run.report.raw_cells = run.grid.raw_count();
  run.report.inflated_cells = run.grid.inflated_count();
  run.report.components = run.grid.component_sizes.size();
  run.paths = plan_pedestrians(run.grid, n, seed, cfg, &run.report);
  return run;
}

}  // namespace cosplan
