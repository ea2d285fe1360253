// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cosplan/geometry.hpp"

namespace cosplan {

/// One semantic obstacle box in the exported schema.
///
/// `rotation` (pitch, yaw, roll in degrees) is retained as metadata only.
/// Every geometric query uses the stored `aabb`, which for rotated records
/// is the conservative axis-aligned hull written by the exporter.
struct BoxRecord {
  std::string label;  ///< Semantic category, e.g. "Vegetation".
  int semantic_id = 0;
  std::string color = "#808080";
  std::uint64_t id = 0;
  Vec3 center = Vec3::Zero();
  Vec3 extent = Vec3::Ones();  ///< Half sizes.
  Vec3 rotation = Vec3::Zero();
  Aabb aabb;

  /// Builds an axis-aligned record whose center and extent follow from `box`.
  static BoxRecord from_aabb(std::string label, int semantic_id, std::string color,
                             std::uint64_t id, const Aabb& box);

  [[nodiscard]] bool axis_aligned() const { return rotation.isZero(0.0); }
};

/// Segment carrier for line-of-sight tests.
struct Ray {
  Vec3 origin;
  Vec3 target;

  /// Throws ValidationError when origin == target.
  Ray(Vec3 origin, Vec3 target);
};

/// Result of a nearest-surface query.
struct SurfaceHit {
  double clearance = std::numeric_limits<double>::infinity();
  Vec3 normal = Vec3::UnitZ();  ///< Outward direction that increases clearance.
  std::optional<std::size_t> box;
};

/// Immutable, validated collection of boxes in the right-handed world frame
/// (+x East, +y North, +z Up, origin at the world origin).
///
/// A uniform xy bucket grid is built once at construction; all queries are
/// const and safe to call from any number of threads.
class BoxMap {
 public:
  static constexpr std::string_view kFrame = "right-handed ENU (+x East, +y North, +z Up), world origin";

  BoxMap() = default;
  /// Validates ids and bounds; throws ValidationError.
  explicit BoxMap(std::vector<BoxRecord> boxes);

  [[nodiscard]] const std::vector<BoxRecord>& boxes() const { return boxes_; }
  [[nodiscard]] std::size_t size() const { return boxes_.size(); }
  [[nodiscard]] bool empty() const { return boxes_.empty(); }
  [[nodiscard]] const std::map<std::string, std::size_t>& category_counts() const { return counts_; }
  /// Union of all AABBs; undefined (zero box) for an empty map.
  [[nodiscard]] const Aabb& bounds() const { return bounds_; }
  [[nodiscard]] std::uint64_t max_id() const;

  /// Signed distance to the nearest AABB surface (negative inside).
  /// Returns +infinity for an empty map.
  [[nodiscard]] double signed_clearance(const Vec3& p) const;

  /// Nearest surface with the outward push direction.
  [[nodiscard]] SurfaceHit nearest_surface(const Vec3& p) const;

  /// True iff the closed segment a-b meets any AABB grown by `inflate`,
  /// ignoring hits that lie within `ignore_margin` of either endpoint.
  [[nodiscard]] bool segment_blocked(const Vec3& a, const Vec3& b, double ignore_margin = 0.0,
                                     double inflate = 0.0) const;

  /// Indices of boxes that are strictly penetrated by p.
  [[nodiscard]] std::vector<std::size_t> containing(const Vec3& p) const;

 private:
  struct Index {
    double x0 = 0.0, y0 = 0.0, cell = 1.0;
    int nx = 0, ny = 0;
    std::vector<std::uint32_t> offsets;  // CSR over cells, size nx*ny+1
    std::vector<std::uint32_t> items;
  };

  void build_index();
  [[nodiscard]] int cell_x(double x) const;
  [[nodiscard]] int cell_y(double y) const;
  template <typename Fn>
  void for_cell(int cx, int cy, Fn&& fn) const;
  template <typename Fn>
  void for_rect(double xlo, double ylo, double xhi, double yhi, Fn&& fn) const;

  std::vector<BoxRecord> boxes_;
  std::map<std::string, std::size_t> counts_;
  Aabb bounds_;
  Index index_;
};

/// Parses a JSON array of box records. Throws ParseError naming the offending
/// index for missing fields or non-finite numbers, ValidationError for
/// inverted bounds, non-positive extents or duplicate ids.
BoxMap load_box_map(std::string_view json_bytes);
BoxMap load_box_map_file(const std::filesystem::path& path);

nlohmann::json box_to_json(const BoxRecord& box);
nlohmann::json box_map_to_json(const BoxMap& map);
void write_box_map_file(const BoxMap& map, const std::filesystem::path& path);
nlohmann::json category_report(const BoxMap& map);

/// Per-axis gap between two AABBs: zero when touching, negative on overlap.
Vec3 aabb_gap(const BoxRecord& a, const BoxRecord& b);
Vec3 aabb_gap(const Aabb& a, const Aabb& b);

/// Signed distance from p to one box (negative inside: minus the distance to
/// the nearest face).
double signed_distance(const Aabb& box, const Vec3& p);

/// Closed parameter interval where segment a + t(b-a), t in [0,1], meets box.
std::optional<std::pair<double, double>> segment_box_interval(const Aabb& box, const Vec3& a,
                                                              const Vec3& b);

double signed_clearance(const Vec3& p, const BoxMap& map);
bool ray_blocked(const Ray& ray, const BoxMap& map, double ignore_margin = 0.0);

}  // namespace cosplan
