// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/polygon.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "cosplan/errors.hpp"
#include "cosplan/io.hpp"

namespace cosplan {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

int orient(const Vec2& o, const Vec2& a, const Vec2& b) {
  const double c = cross(o, a, b);
  return (c > 0.0) - (c < 0.0);
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

void validate_ring(const Ring& ring, const std::string& name) {
  if (ring.size() < 3) throw ValidationError(name + " needs at least 3 vertices, got " + std::to_string(ring.size()));
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (!ring[i].allFinite()) throw ValidationError(name + " vertex " + std::to_string(i) + " is not finite");
    if (ring[i] == ring[(i + 1) % ring.size()])
      throw ValidationError(name + " has a repeated vertex at " + std::to_string(i));
  }
  if (auto hit = find_self_intersection(ring)) {
    throw ValidationError(name + " is self-intersecting: edge " + std::to_string(hit->first) + " crosses edge " +
                          std::to_string(hit->second));
  }
  double area2 = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % ring.size()];
    area2 += a.x() * b.y() - b.x() * a.y();
  }
  if (area2 == 0.0) throw ValidationError(name + " has zero area");
}

Ring read_ring(const nlohmann::json& arr, const std::string& name) {
  if (!arr.is_array()) throw ParseError(name + " must be an array of [x, y] pairs");
  Ring ring;
  ring.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& pt = arr[i];
    if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
      throw ParseError(name + " vertex " + std::to_string(i) + " must be [x, y]");
    ring.emplace_back(pt[0].get<double>(), pt[1].get<double>());
  }
  // Accept an explicitly repeated closing vertex.
  if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  return ring;
}

nlohmann::json ring_json(const Ring& ring) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : ring) arr.push_back({p.x(), p.y()});
  return arr;
}

}  // namespace

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(const Ring& ring) {
  const std::size_t n = ring.size();
  if (n < 3) return std::nullopt;
  auto p = [&](std::size_t i) -> const Vec2& { return ring[i % n]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges share one vertex; they are fine unless they fold
        // back onto each other.
        const Vec2& shared = j == i + 1 ? p(j) : p(i);
        const Vec2& u = j == i + 1 ? p(i) : p(i + 1);
        const Vec2& v = j == i + 1 ? p(j + 1) : p(j);
        if (orient(shared, u, v) == 0 && (u - shared).dot(v - shared) > 0.0) return std::make_pair(i, j);
        continue;
      }
      if (segments_intersect(p(i), p(i + 1), p(j), p(j + 1))) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

bool point_in_ring(const Ring& ring, const Vec2& p) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

void RoiPolygon::validate() const {
  if (!closed) throw ValidationError("ROI polygon is not closed");
  validate_ring(outer, "outer ring");
  for (std::size_t h = 0; h < holes.size(); ++h) {
    const Ring& hole = holes[h];
    validate_ring(hole, "hole " + std::to_string(h));
    for (const auto& v : hole)
      if (!point_in_ring(outer, v)) throw ValidationError("hole " + std::to_string(h) + " leaves the outer ring");
    for (std::size_t i = 0; i < hole.size(); ++i)
      for (std::size_t j = 0; j < outer.size(); ++j)
        if (segments_intersect(hole[i], hole[(i + 1) % hole.size()], outer[j], outer[(j + 1) % outer.size()]))
          throw ValidationError("hole " + std::to_string(h) + " crosses the outer ring");
  }
}

bool RoiPolygon::contains(const Vec2& p) const {
  if (!point_in_ring(outer, p)) return false;
  for (const auto& h : holes)
    if (point_in_ring(h, p)) return false;
  return true;
}

RoiPolygon parse_roi(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("ROI polygon is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("ROI polygon must be a JSON object");
  RoiPolygon roi;
  roi.description = doc.value("description", std::string{});
  if (!doc.contains("closed") || !doc["closed"].is_boolean()) throw ParseError("ROI polygon needs boolean 'closed'");
  roi.closed = doc["closed"].get<bool>();
  if (!doc.contains("points_world")) throw ParseError("ROI polygon needs 'points_world'");
  roi.outer = read_ring(doc["points_world"], "points_world");
  if (doc.contains("holes")) {
    const auto& holes = doc["holes"];
    if (!holes.is_array()) throw ParseError("'holes' must be an array of rings");
    for (std::size_t h = 0; h < holes.size(); ++h) roi.holes.push_back(read_ring(holes[h], "hole " + std::to_string(h)));
  }
  roi.validate();
  return roi;
}

RoiPolygon load_roi_file(const std::filesystem::path& path) { return parse_roi(read_text_file(path)); }

nlohmann::json roi_to_json(const RoiPolygon& roi) {
  nlohmann::json holes = nlohmann::json::array();
  for (const auto& h : roi.holes) holes.push_back(ring_json(h));
  return {{"description", roi.description},
          {"closed", roi.closed},
          {"points_world", ring_json(roi.outer)},
          {"holes", holes}};
}

void write_roi_file_atomic(const RoiPolygon& roi, const std::filesystem::path& path) {
  roi.validate();
  write_json_atomic(path, roi_to_json(roi));
}

}  // namespace cosplan
