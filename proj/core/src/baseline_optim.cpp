// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

// Optimization-style reference planners. All start from the straight
// start -> goal line (minimum jerk from a decimated grid path) and only see
// obstacle clearance, never the target.

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <deque>

#include "baseline_internal.hpp"

namespace cosplan::baseline_detail {

namespace {

Vec3 clamp_to(const Aabb& box, const Vec3& p) { return p.cwiseMax(box.lo).cwiseMin(box.hi); }

}  // namespace

PathResult elastic_band(const Problem& pb) {
  std::vector<Vec3> pts = straight_line(pb.start, pb.goal, pb.cfg.path_spacing);
  const double influence = 2.0 * pb.cfg.clearance_margin;
  const double step = pb.cfg.elastic_step;
  int sweeps = 0;
  for (; sweeps < pb.cfg.elastic_sweeps; ++sweeps) {
    double moved = 0.0;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      Vec3 force = 0.5 * (pts[i - 1] + pts[i + 1]) - pts[i];
      const SurfaceHit hit = pb.map.nearest_surface(pts[i]);
      if (hit.clearance < influence) force += (influence - hit.clearance) * hit.normal;
      const Vec3 q = clamp_to(pb.bounds, pts[i] + step * force);
      moved = std::max(moved, (q - pts[i]).norm());
      pts[i] = q;
    }
    if (moved < 1e-6) break;
  }
  PathResult res;
  res.path = std::move(pts);
  res.diagnostics = {{"sweeps", sweeps}};
  return res;
}

PathResult minimum_jerk(const Problem& pb) {
  // Via points: every k-th cell of the grid A* path, or just the endpoints
  // when the grid search fails.
  std::vector<Vec3> via{pb.start, pb.goal};
  const PathResult guide = search_grid(pb, 1.0, false);
  const bool guided = guide.failure.empty() && guide.path.size() > 2;
  if (guided) {
    via.clear();
    const std::size_t k = static_cast<std::size_t>(pb.cfg.minjerk_decimation);
    for (std::size_t i = 0; i < guide.path.size(); i += k) via.push_back(guide.path[i]);
    if ((via.back() - guide.path.back()).norm() > 1e-9) via.push_back(guide.path.back());
  }
  const std::size_t m = via.size();
  std::vector<double> t(m, 0.0);
  for (std::size_t i = 1; i < m; ++i) t[i] = t[i - 1] + std::max((via[i] - via[i - 1]).norm(), 1e-6);
  // Clamped ends: zero velocity at start and goal, Catmull-Rom velocities and
  // zero acceleration at interior via points.
  std::vector<Vec3> vel(m, Vec3::Zero());
  for (std::size_t i = 1; i + 1 < m; ++i) vel[i] = (via[i + 1] - via[i - 1]) / (t[i + 1] - t[i - 1]);

  PathResult res;
  res.path.push_back(via.front());
  for (std::size_t s = 0; s + 1 < m; ++s) {
    const double T = t[s + 1] - t[s];
    const int samples = std::max(2, static_cast<int>(std::ceil(T / pb.cfg.path_spacing)));
    for (int k = 1; k <= samples; ++k) {
      const double u = static_cast<double>(k) / samples;
      const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
      // Quintic Hermite basis with zero end accelerations.
      const double h0 = 1 - 10 * u3 + 15 * u4 - 6 * u5;
      const double h1 = u - 6 * u3 + 8 * u4 - 3 * u5;
      const double h4 = -4 * u3 + 7 * u4 - 3 * u5;
      const double h5 = 10 * u3 - 15 * u4 + 6 * u5;
      res.path.push_back(h0 * via[s] + h1 * T * vel[s] + h4 * T * vel[s + 1] + h5 * via[s + 1]);
    }
  }
  res.diagnostics = {{"via_points", m}, {"guided_by_grid_path", guided}};
  return res;
}

PathResult potential_field(const Problem& pb) {
  const auto& c = pb.cfg;
  Vec3 p = pb.start;
  PathResult res;
  res.path.push_back(p);
  bool reached = false;
  int steps = 0;
  for (; steps < c.pf_steps; ++steps) {
    const Vec3 to_goal = pb.goal - p;
    const double dist = to_goal.norm();
    if (dist <= c.goal_radius) {
      reached = true;
      break;
    }
    Vec3 force = c.pf_attractive_gain * to_goal / dist;
    const SurfaceHit hit = pb.map.nearest_surface(p);
    if (hit.clearance < c.pf_influence) {
      const double d = std::max(hit.clearance, 0.1);
      force += c.pf_repulsive_gain * (1.0 / d - 1.0 / c.pf_influence) / (d * d) * hit.normal;
    }
    if (force.norm() < 1e-12) break;
    p = clamp_to(pb.bounds, p + std::min(c.pf_step_size, dist) * force.normalized());
    res.path.push_back(p);
  }
  res.path.push_back(pb.goal);
  res.diagnostics = {{"steps", steps}, {"reached_goal_by_descent", reached}};
  return res;
}

PathResult chomp_lite(const Problem& pb) {
  const auto& c = pb.cfg;
  std::vector<Vec3> pts = straight_line(pb.start, pb.goal, c.path_spacing);
  const int m = static_cast<int>(pts.size()) - 2;
  // Smoothness metric: A = K^T K for first differences with fixed ends.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    A(i, i) = 2.0;
    if (i > 0) A(i, i - 1) = A(i - 1, i) = -1.0;
  }
  const Eigen::LDLT<Eigen::MatrixXd> solver(A);
  Eigen::MatrixXd X(m, 3), B = Eigen::MatrixXd::Zero(m, 3);
  for (int i = 0; i < m; ++i) X.row(i) = pts[static_cast<std::size_t>(i) + 1].transpose();
  B.row(0) = -pb.start.transpose();
  B.row(m - 1) -= pb.goal.transpose();

  int it = 0;
  for (; it < c.chomp_iters; ++it) {
    Eigen::MatrixXd G = A * X + B;
    for (int i = 0; i < m; ++i) {
      const SurfaceHit hit = pb.map.nearest_surface(X.row(i).transpose());
      const double d = hit.clearance;
      if (d >= c.chomp_epsilon) continue;
      const double slope = d < 0.0 ? 1.0 : (c.chomp_epsilon - d) / c.chomp_epsilon;
      G.row(i) -= c.chomp_obstacle_weight * slope * hit.normal.transpose();
    }
    Eigen::MatrixXd delta = c.chomp_step * solver.solve(G);
    // Keep each update within one voxel per point.
    const double biggest = delta.rowwise().norm().maxCoeff();
    if (biggest > c.voxel) delta *= c.voxel / biggest;
    X -= delta;
    for (int i = 0; i < m; ++i) X.row(i) = clamp_to(pb.bounds, X.row(i).transpose()).transpose();
    if (biggest < 1e-6) break;
  }
  for (int i = 0; i < m; ++i) pts[static_cast<std::size_t>(i) + 1] = X.row(i).transpose();
  PathResult res;
  res.path = std::move(pts);
  res.diagnostics = {{"iterations", it}};
  return res;
}

namespace {

// Smoothness (squared second differences, fixed ends) plus a squared
// clearance hinge at the clearance margin.
class TrajoptObjective {
 public:
  TrajoptObjective(const Problem& pb, std::size_t m) : pb_(pb), m_(m) {}

  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
    const std::size_t n = m_ + 2;
    auto at = [&](std::size_t i) -> Vec3 {
      if (i == 0) return pb_.start;
      if (i == n - 1) return pb_.goal;
      return x.segment<3>(static_cast<Eigen::Index>(3 * (i - 1)));
    };
    grad.setZero(x.size());
    auto add = [&](std::size_t i, const Vec3& g) {
      if (i >= 1 && i + 1 < n) grad.segment<3>(static_cast<Eigen::Index>(3 * (i - 1))) += g;
    };
    double f = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const Vec3 r = at(i + 1) - 2.0 * at(i) + at(i - 1);
      f += r.squaredNorm();
      add(i - 1, 2.0 * r);
      add(i, -4.0 * r);
      add(i + 1, 2.0 * r);
    }
    const double margin = pb_.cfg.clearance_margin, w = pb_.cfg.qn_clearance_weight;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const SurfaceHit hit = pb_.map.nearest_surface(at(i));
      if (hit.clearance >= margin) continue;
      const double gap = margin - hit.clearance;
      f += w * gap * gap;
      add(i, -2.0 * w * gap * hit.normal);
    }
    return f;
  }

 private:
  const Problem& pb_;
  std::size_t m_;
};

}  // namespace

PathResult quasi_newton_trajopt(const Problem& pb) {
  const auto& c = pb.cfg;
  std::vector<Vec3> pts = straight_line(pb.start, pb.goal, c.path_spacing);
  const std::size_t m = pts.size() - 2;
  Eigen::VectorXd x(static_cast<Eigen::Index>(3 * m)), lo(x.size()), hi(x.size());
  for (std::size_t i = 0; i < m; ++i) {
    x.segment<3>(static_cast<Eigen::Index>(3 * i)) = pts[i + 1];
    lo.segment<3>(static_cast<Eigen::Index>(3 * i)) = pb.bounds.lo;
    hi.segment<3>(static_cast<Eigen::Index>(3 * i)) = pb.bounds.hi;
  }
  auto project = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(v.cwiseMax(lo).cwiseMin(hi)); };

  // Projected L-BFGS with Armijo backtracking on the projected arc.
  const TrajoptObjective objective(pb, m);
  Eigen::VectorXd g(x.size()), g_new(x.size());
  double f = objective(x, g);
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> memory;
  int it = 0;
  for (; it < c.qn_iters; ++it) {
    Eigen::VectorXd q = g;
    std::vector<double> alphas;
    for (auto mit = memory.rbegin(); mit != memory.rend(); ++mit) {
      const double a = mit->first.dot(q) / mit->second.dot(mit->first);
      alphas.push_back(a);
      q -= a * mit->second;
    }
    if (!memory.empty()) {
      const auto& [s, y] = memory.back();
      q *= s.dot(y) / y.dot(y);
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const auto& [s, y] = memory[k];
      const double b = y.dot(q) / y.dot(s);
      q += s * (alphas[memory.size() - 1 - k] - b);
    }
    Eigen::VectorXd dir = -q;
    if (dir.dot(g) >= 0.0) {
      dir = -g;
      memory.clear();
    }
    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = f;
    for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
      x_new = project(x + step * dir);
      f_new = objective(x_new, g_new);
      if (f_new <= f + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    Eigen::VectorXd s = x_new - x, y = g_new - g;
    if (s.dot(y) > 1e-10) {
      memory.emplace_back(std::move(s), std::move(y));
      if (memory.size() > static_cast<std::size_t>(c.qn_memory)) memory.pop_front();
    }
    const double df = f - f_new;
    x = std::move(x_new);
    g = g_new;
    f = f_new;
    if (df < 1e-9) break;
  }
  for (std::size_t i = 0; i < m; ++i) pts[i + 1] = x.segment<3>(static_cast<Eigen::Index>(3 * i));
  PathResult res;
  res.path = std::move(pts);
  res.diagnostics = {{"iterations", it}, {"final_objective", f}};
  return res;
}

}  // namespace cosplan::baseline_detail
