// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "cosplan/boxmap.hpp"
#include "cosplan/polygon.hpp"

namespace cosplan {

struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// World to grid mapping: g = floor((x - x_min) / resolution).
struct GridSpec {
  double resolution = 0.5;
  Vec2 origin = Vec2::Zero();  ///< (x_min, y_min)
  int width = 0;
  int height = 0;
  double ground_z = 0.0;
  double human_height = 2.0;
  double inflation_radius = 0.5;

  [[nodiscard]] Cell to_cell(const Vec2& p) const {
    return {static_cast<int>(std::floor((p.x() - origin.x()) / resolution)),
            static_cast<int>(std::floor((p.y() - origin.y()) / resolution))};
  }
  [[nodiscard]] Vec2 cell_center(const Cell& c) const {
    return {origin.x() + (c.x + 0.5) * resolution, origin.y() + (c.y + 0.5) * resolution};
  }
  [[nodiscard]] bool in_bounds(const Cell& c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  [[nodiscard]] std::size_t index(const Cell& c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.x);
  }
  [[nodiscard]] std::size_t cell_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  /// Throws ConfigError on non-positive resolution or dimensions.
  void validate() const;

  /// Smallest grid covering [lo, hi] in xy, padded by `margin` on every side.
  static GridSpec covering(const Vec2& lo, const Vec2& hi, double resolution, double margin = 0.0);
};

nlohmann::json grid_spec_to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& doc);

inline constexpr std::size_t kDefaultCellBudget = 64'000'000;

struct OccupancyGrid {
  GridSpec spec;
  std::vector<std::uint8_t> raw_occupied;
  std::vector<std::uint8_t> inflated_occupied;
  /// -1 on occupied cells, otherwise a label in [0, component_sizes.size()).
  std::vector<std::int32_t> component_labels;
  std::vector<std::size_t> component_sizes;

  [[nodiscard]] bool is_free(const Cell& c) const {
    return spec.in_bounds(c) && inflated_occupied[spec.index(c)] == 0;
  }
  [[nodiscard]] std::int32_t label(const Cell& c) const {
    return spec.in_bounds(c) ? component_labels[spec.index(c)] : -1;
  }
  [[nodiscard]] std::size_t raw_count() const;
  [[nodiscard]] std::size_t inflated_count() const;
};

/// Marks cells whose interior overlaps a box footprint, for boxes whose
/// vertical extent overlaps (ground_z, ground_z + human_height) with positive
/// length, then dilates by a disk of inflation_radius measured between cell
/// centers. Labels 8-connected free components without discarding any.
/// Throws ResourceError when the grid exceeds `max_cells`.
OccupancyGrid build_occupancy(const BoxMap& map, const GridSpec& spec, std::size_t max_cells = kDefaultCellBudget);

/// Folds cells outside the ROI and components smaller than
/// `min_component_cells` into the occupied set, then relabels.
OccupancyGrid free_space_regions(OccupancyGrid grid, const RoiPolygon* roi, std::size_t min_component_cells = 4000);

/// 8-connected labelling of cells with occupied == 0. Returns sizes.
std::vector<std::size_t> label_components(const GridSpec& spec, const std::vector<std::uint8_t>& occupied,
                                          std::vector<std::int32_t>& labels);

/// One byte per cell, row y = 0 first: 0 free, 255 inflated, 128 raw.
std::vector<std::uint8_t> grid_mask_bytes(const OccupancyGrid& grid);

/// Grayscale PNG with image row 0 = grid row height-1 (north up).
void write_grid_mask_png(const OccupancyGrid& grid, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_grid_mask_png(const OccupancyGrid& grid);

}  // namespace cosplan
