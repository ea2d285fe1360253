// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Slow reference implementations used to check the fast ones.

#pragma once

#include <cstdint>
#include <optional>

#include "cosplan/boxmap.hpp"
#include "cosplan/occupancy.hpp"
#include "cosplan/trajectory.hpp"

namespace cosplan::testing {

/// width x height grid with each cell blocked independently with
/// probability `density`; no inflation.
OccupancyGrid random_grid(std::uint64_t seed, int width, int height, double density);

/// Dijkstra over the same 8-connected move set as the planner (unit and
/// sqrt(2) steps, diagonals only when both side cells are free). nullopt
/// when the goal is unreachable.
std::optional<double> dijkstra_cost(const OccupancyGrid& grid, const Cell& start, const Cell& goal);

/// Fraction of offset rays whose densely sampled interior (excluding
/// `margin` at both ends) never lies strictly inside a box.
double sampled_visibility(const Vec3& drone, const Vec3& target, const BoxMap& map, const VisibilityConfig& cfg,
                          int samples = 4000);

}  // namespace cosplan::testing
