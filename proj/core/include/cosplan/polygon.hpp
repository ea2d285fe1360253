// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cosplan/geometry.hpp"

namespace cosplan {

/// Vertices in order; the closing edge back to the first vertex is implicit.
using Ring = std::vector<Vec2>;

/// Walkable region: inside the outer ring and outside every hole.
struct RoiPolygon {
  std::string description;
  bool closed = true;
  Ring outer;
  std::vector<Ring> holes;

  /// Throws ValidationError for open polygons, rings with fewer than three
  /// distinct vertices, self-intersecting rings, or holes that are not
  /// strictly inside the outer ring.
  void validate() const;

  [[nodiscard]] bool contains(const Vec2& p) const;
};

/// Even-odd crossing test. Points exactly on an edge may land either way.
bool point_in_ring(const Ring& ring, const Vec2& p);

/// Returns the first pair of intersecting non-adjacent edges, if any. Edge k
/// runs from vertex k to vertex k+1 (mod n).
std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(const Ring& ring);

/// Closed-segment intersection including collinear overlap.
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

RoiPolygon parse_roi(std::string_view json_bytes);
RoiPolygon load_roi_file(const std::filesystem::path& path);
nlohmann::json roi_to_json(const RoiPolygon& roi);

/// Writes via a sibling temp file and rename so readers never see a torn file.
void write_roi_file_atomic(const RoiPolygon& roi, const std::filesystem::path& path);

}  // namespace cosplan
