// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/boxmap.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "cosplan/errors.hpp"
#include "cosplan/io.hpp"

namespace cosplan {

using nlohmann::json;

BoxRecord BoxRecord::from_aabb(std::string label, int semantic_id, std::string color,
                               std::uint64_t id, const Aabb& box) {
  BoxRecord r;
  r.label = std::move(label);
  r.semantic_id = semantic_id;
  r.color = std::move(color);
  r.id = id;
  r.center = box.center();
  r.extent = box.half_extent();
  r.rotation.setZero();
  r.aabb = box;
  return r;
}

Ray::Ray(Vec3 o, Vec3 t) : origin(std::move(o)), target(std::move(t)) {
  if (origin == target) throw ValidationError("degenerate ray: origin equals target");
}

namespace {

constexpr std::size_t kMaxIndexCells = std::size_t{1} << 22;

void validate_record(const BoxRecord& b, std::size_t index) {
  const auto where = [&] { return " (record " + std::to_string(index) + ", id " + std::to_string(b.id) + ")"; };
  if ((b.aabb.lo.array() > b.aabb.hi.array()).any())
    throw ValidationError("aabb min exceeds max" + where());
  if ((b.extent.array() <= 0.0).any()) throw ValidationError("extent must be strictly positive" + where());
  if (b.axis_aligned()) {
    for (int k = 0; k < 3; ++k) {
      const double tol = 1e-6 * (1.0 + std::abs(b.center[k]) + b.extent[k]);
      if (std::abs(b.aabb.lo[k] - (b.center[k] - b.extent[k])) > tol ||
          std::abs(b.aabb.hi[k] - (b.center[k] + b.extent[k])) > tol)
        throw ValidationError("axis-aligned record disagrees with center +/- extent" + where());
    }
  }
}

}  // namespace

BoxMap::BoxMap(std::vector<BoxRecord> boxes) : boxes_(std::move(boxes)) {
  std::unordered_set<std::uint64_t> ids;
  ids.reserve(boxes_.size());
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    const auto& b = boxes_[i];
    validate_record(b, i);
    if (!ids.insert(b.id).second) throw ValidationError("duplicate box id " + std::to_string(b.id));
    ++counts_[b.label];
    if (i == 0)
      bounds_ = b.aabb;
    else
      bounds_.expand(b.aabb);
  }
  build_index();
}

std::uint64_t BoxMap::max_id() const {
  std::uint64_t m = 0;
  for (const auto& b : boxes_) m = std::max(m, b.id);
  return m;
}

void BoxMap::build_index() {
  index_ = Index{};
  if (boxes_.empty()) return;
  const double w = std::max(bounds_.hi.x() - bounds_.lo.x(), 1e-3);
  const double h = std::max(bounds_.hi.y() - bounds_.lo.y(), 1e-3);
  // Roughly two boxes per cell on average, but never finer than 1 m.
  double cell = std::max(1.0, std::sqrt(2.0 * w * h / static_cast<double>(boxes_.size())));
  while ((w / cell + 1.0) * (h / cell + 1.0) > static_cast<double>(kMaxIndexCells)) cell *= 2.0;

  index_.x0 = bounds_.lo.x();
  index_.y0 = bounds_.lo.y();
  index_.cell = cell;
  index_.nx = static_cast<int>(std::floor(w / cell)) + 1;
  index_.ny = static_cast<int>(std::floor(h / cell)) + 1;

  const std::size_t ncell = static_cast<std::size_t>(index_.nx) * static_cast<std::size_t>(index_.ny);
  index_.offsets.assign(ncell + 1, 0);
  auto visit = [&](auto&& fn) {
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
      const auto& a = boxes_[i].aabb;
      const int x0 = cell_x(a.lo.x()), x1 = cell_x(a.hi.x());
      const int y0 = cell_y(a.lo.y()), y1 = cell_y(a.hi.y());
      for (int cy = y0; cy <= y1; ++cy)
        for (int cx = x0; cx <= x1; ++cx) fn(static_cast<std::size_t>(cy) * index_.nx + cx, i);
    }
  };
  visit([&](std::size_t c, std::size_t) { ++index_.offsets[c + 1]; });
  for (std::size_t c = 0; c < ncell; ++c) index_.offsets[c + 1] += index_.offsets[c];
  index_.items.resize(index_.offsets[ncell]);
  std::vector<std::uint32_t> fill(index_.offsets.begin(), index_.offsets.end() - 1);
  visit([&](std::size_t c, std::size_t i) { index_.items[fill[c]++] = static_cast<std::uint32_t>(i); });
}

int BoxMap::cell_x(double x) const {
  const double g = std::floor((x - index_.x0) / index_.cell);
  return static_cast<int>(std::clamp(g, 0.0, static_cast<double>(index_.nx - 1)));
}

int BoxMap::cell_y(double y) const {
  const double g = std::floor((y - index_.y0) / index_.cell);
  return static_cast<int>(std::clamp(g, 0.0, static_cast<double>(index_.ny - 1)));
}

template <typename Fn>
void BoxMap::for_cell(int cx, int cy, Fn&& fn) const {
  const std::size_t c = static_cast<std::size_t>(cy) * index_.nx + cx;
  for (std::uint32_t k = index_.offsets[c]; k < index_.offsets[c + 1]; ++k) fn(index_.items[k]);
}

template <typename Fn>
void BoxMap::for_rect(double xlo, double ylo, double xhi, double yhi, Fn&& fn) const {
  if (boxes_.empty()) return;
  if (xhi < bounds_.lo.x() || xlo > bounds_.hi.x() || yhi < bounds_.lo.y() || ylo > bounds_.hi.y()) return;
  const int x0 = cell_x(xlo), x1 = cell_x(xhi), y0 = cell_y(ylo), y1 = cell_y(yhi);
  for (int cy = y0; cy <= y1; ++cy)
    for (int cx = x0; cx <= x1; ++cx) for_cell(cx, cy, fn);
}

double signed_distance(const Aabb& box, const Vec3& p) {
  if (box.strictly_contains(p)) {
    const Vec3 d = (p - box.lo).cwiseMin(box.hi - p);
    return -d.minCoeff();
  }
  return outside_distance(box, p);
}

namespace {

// Direction that increases the distance to `box` fastest from p.
Vec3 push_normal(const Aabb& box, const Vec3& p) {
  if (box.strictly_contains(p)) {
    int axis = 0;
    double best = std::numeric_limits<double>::infinity();
    double sign = 1.0;
    for (int k = 0; k < 3; ++k) {
      const double dl = p[k] - box.lo[k], dh = box.hi[k] - p[k];
      if (dl < best) best = dl, axis = k, sign = -1.0;
      if (dh < best) best = dh, axis = k, sign = 1.0;
    }
    Vec3 n = Vec3::Zero();
    n[axis] = sign;
    return n;
  }
  const Vec3 closest = p.cwiseMax(box.lo).cwiseMin(box.hi);
  const Vec3 d = p - closest;
  const double len = d.norm();
  if (len > 0.0) return d / len;
  // On the surface: the face whose axis has the largest normalized offset.
  const Vec3 c = box.center();
  const Vec3 e = box.half_extent();
  int axis = 0;
  double best = -1.0;
  for (int k = 0; k < 3; ++k) {
    const double r = e[k] > 0 ? std::abs(p[k] - c[k]) / e[k] : 1.0;
    if (r > best) best = r, axis = k;
  }
  Vec3 n = Vec3::Zero();
  n[axis] = p[axis] >= c[axis] ? 1.0 : -1.0;
  return n;
}

}  // namespace

SurfaceHit BoxMap::nearest_surface(const Vec3& p) const {
  SurfaceHit hit;
  if (boxes_.empty()) return hit;
  const int cx = cell_x(p.x()), cy = cell_y(p.y());
  auto consider = [&](std::uint32_t i) {
    const double d = signed_distance(boxes_[i].aabb, p);
    if (d < hit.clearance || (d == hit.clearance && hit.box && i < *hit.box)) {
      hit.clearance = d;
      hit.box = i;
    }
  };
  for (int r = 0;; ++r) {
    for (int y = cy - r; y <= cy + r; ++y) {
      if (y < 0 || y >= index_.ny) continue;
      const bool edge_row = (y == cy - r || y == cy + r);
      for (int x = cx - r; x <= cx + r; x += (edge_row || r == 0) ? 1 : 2 * r) {
        if (x >= 0 && x < index_.nx) for_cell(x, y, consider);
      }
    }
    if (cx - r <= 0 && cx + r >= index_.nx - 1 && cy - r <= 0 && cy + r >= index_.ny - 1) break;
    // Anything not yet visited lies outside the searched block in xy, so its
    // distance is at least the distance to the nearest interior block side.
    double lb = std::numeric_limits<double>::infinity();
    if (cx - r > 0) lb = std::min(lb, p.x() - (index_.x0 + (cx - r) * index_.cell));
    if (cx + r < index_.nx - 1) lb = std::min(lb, index_.x0 + (cx + r + 1) * index_.cell - p.x());
    if (cy - r > 0) lb = std::min(lb, p.y() - (index_.y0 + (cy - r) * index_.cell));
    if (cy + r < index_.ny - 1) lb = std::min(lb, index_.y0 + (cy + r + 1) * index_.cell - p.y());
    if (hit.clearance <= std::max(lb, 0.0)) break;
  }
  if (hit.box) hit.normal = push_normal(boxes_[*hit.box].aabb, p);
  return hit;
}

double BoxMap::signed_clearance(const Vec3& p) const { return nearest_surface(p).clearance; }

std::optional<std::pair<double, double>> segment_box_interval(const Aabb& box, const Vec3& a,
                                                              const Vec3& b) {
  double t0 = 0.0, t1 = 1.0;
  const Vec3 d = b - a;
  for (int k = 0; k < 3; ++k) {
    if (d[k] == 0.0) {
      if (a[k] < box.lo[k] || a[k] > box.hi[k]) return std::nullopt;
      continue;
    }
    double ta = (box.lo[k] - a[k]) / d[k];
    double tb = (box.hi[k] - a[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return std::make_pair(t0, t1);
}

bool BoxMap::segment_blocked(const Vec3& a_in, const Vec3& b_in, double ignore_margin,
                             double inflate) const {
  if (boxes_.empty()) return false;
  // Canonical endpoint order makes the floating-point result symmetric.
  const bool swap = std::lexicographical_compare(b_in.data(), b_in.data() + 3, a_in.data(), a_in.data() + 3);
  const Vec3& a = swap ? b_in : a_in;
  const Vec3& b = swap ? a_in : b_in;

  const double len = (b - a).norm();
  double tlo = 0.0, thi = 1.0;
  if (ignore_margin > 0.0) {
    if (len == 0.0) return false;
    tlo = ignore_margin / len;
    thi = 1.0 - tlo;
    if (tlo > thi) return false;
  }

  bool blocked = false;
  auto test = [&](std::uint32_t i) {
    if (blocked) return;
    const Aabb box = inflate > 0.0 ? boxes_[i].aabb.inflated(inflate) : boxes_[i].aabb;
    if (auto iv = segment_box_interval(box, a, b)) {
      if (iv->first <= thi && iv->second >= tlo) blocked = true;
    }
  };

  const double xlo = std::min(a.x(), b.x()) - inflate, xhi = std::max(a.x(), b.x()) + inflate;
  const double ylo = std::min(a.y(), b.y()) - inflate, yhi = std::max(a.y(), b.y()) + inflate;
  const double span_cells = ((xhi - xlo) / index_.cell + 1.0) * ((yhi - ylo) / index_.cell + 1.0);
  if (span_cells <= 256.0) {
    for_rect(xlo, ylo, xhi, yhi, test);
    return blocked;
  }

  // Long segments: march in half-cell steps and test the 3x3 block around
  // each sample, which covers every cell within one cell of the segment.
  const int pad = 1 + static_cast<int>(std::ceil(inflate / index_.cell));
  const double hlen = Vec2(b.x() - a.x(), b.y() - a.y()).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(hlen / (0.5 * index_.cell))));
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(index_.nx) * index_.ny, 0);
  for (int s = 0; s <= steps && !blocked; ++s) {
    const double t = static_cast<double>(s) / steps;
    const int gx = cell_x(a.x() + t * (b.x() - a.x()));
    const int gy = cell_y(a.y() + t * (b.y() - a.y()));
    for (int y = std::max(0, gy - pad); y <= std::min(index_.ny - 1, gy + pad); ++y)
      for (int x = std::max(0, gx - pad); x <= std::min(index_.nx - 1, gx + pad); ++x) {
        auto& flag = seen[static_cast<std::size_t>(y) * index_.nx + x];
        if (flag) continue;
        flag = 1;
        for_cell(x, y, test);
      }
  }
  return blocked;
}

std::vector<std::size_t> BoxMap::containing(const Vec3& p) const {
  std::vector<std::size_t> out;
  if (boxes_.empty()) return out;
  for_cell(cell_x(p.x()), cell_y(p.y()), [&](std::uint32_t i) {
    if (boxes_[i].aabb.strictly_contains(p)) out.push_back(i);
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Vec3 aabb_gap(const Aabb& a, const Aabb& b) {
  return (b.lo - a.hi).cwiseMax(a.lo - b.hi);
}

Vec3 aabb_gap(const BoxRecord& a, const BoxRecord& b) { return aabb_gap(a.aabb, b.aabb); }

double signed_clearance(const Vec3& p, const BoxMap& map) { return map.signed_clearance(p); }

bool ray_blocked(const Ray& ray, const BoxMap& map, double ignore_margin) {
  return map.segment_blocked(ray.origin, ray.target, ignore_margin);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Vec3 read_vec3(const json& rec, const char* key, std::size_t index) {
  const auto it = rec.find(key);
  if (it == rec.end())
    throw ParseError("box record " + std::to_string(index) + ": missing field '" + key + "'");
  if (!it->is_array() || it->size() != 3)
    throw ParseError("box record " + std::to_string(index) + ": field '" + key + "' must be a 3-array");
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    const auto& x = (*it)[k];
    if (!x.is_number())
      throw ParseError("box record " + std::to_string(index) + ": field '" + key + "' is not numeric");
    v[k] = x.get<double>();
    if (!std::isfinite(v[k]))
      throw ParseError("box record " + std::to_string(index) + ": field '" + key + "' is not finite");
  }
  return v;
}

template <typename T>
T read_scalar(const json& rec, const char* key, std::size_t index) {
  const auto it = rec.find(key);
  if (it == rec.end())
    throw ParseError("box record " + std::to_string(index) + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError("box record " + std::to_string(index) + ": field '" + key + "' has the wrong type");
  }
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

BoxMap load_box_map(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("box map is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("box map must be a JSON array");

  std::vector<BoxRecord> boxes;
  boxes.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& rec = doc[i];
    if (!rec.is_object()) throw ParseError("box record " + std::to_string(i) + " is not an object");
    BoxRecord b;
    b.label = read_scalar<std::string>(rec, "type", i);
    b.semantic_id = read_scalar<int>(rec, "semantic_id", i);
    b.color = read_scalar<std::string>(rec, "color", i);
    if (!rec.contains("id")) throw ParseError("box record " + std::to_string(i) + ": missing field 'id'");
    // The parser stores every non-negative integer literal as unsigned.
    if (!rec["id"].is_number_unsigned())
      throw ParseError("box record " + std::to_string(i) + ": field 'id' must be an unsigned integer");
    b.id = rec["id"].get<std::uint64_t>();
    b.center = read_vec3(rec, "center", i);
    b.extent = read_vec3(rec, "extent", i);
    b.rotation = read_vec3(rec, "rotation", i);
    b.aabb.lo = read_vec3(rec, "min", i);
    b.aabb.hi = read_vec3(rec, "max", i);
    boxes.push_back(std::move(b));
  }
  return BoxMap(std::move(boxes));
}

BoxMap load_box_map_file(const std::filesystem::path& path) { return load_box_map(read_text_file(path)); }

json box_to_json(const BoxRecord& b) {
  return json{{"type", b.label},           {"semantic_id", b.semantic_id}, {"color", b.color},
              {"id", b.id},                {"center", vec_json(b.center)}, {"extent", vec_json(b.extent)},
              {"rotation", vec_json(b.rotation)}, {"min", vec_json(b.aabb.lo)}, {"max", vec_json(b.aabb.hi)}};
}

json box_map_to_json(const BoxMap& map) {
  json out = json::array();
  for (const auto& b : map.boxes()) out.push_back(box_to_json(b));
  return out;
}

void write_box_map_file(const BoxMap& map, const std::filesystem::path& path) {
  write_text_atomic(path, box_map_to_json(map).dump() + "\n");
}

json category_report(const BoxMap& map) {
  json out = json::object();
  const double total = static_cast<double>(map.size());
  for (const auto& [label, n] : map.category_counts()) {
    out[label] = {{"count", n}, {"percent", total > 0 ? 100.0 * static_cast<double>(n) / total : 0.0}};
  }
  return json{{"total", map.size()}, {"categories", out}};
}

}  // namespace cosplan
