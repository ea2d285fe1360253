// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/occupancy.hpp"

#include <png.h>

#include <algorithm>
#include <deque>
#include <nlohmann/json.hpp>

#include "cosplan/errors.hpp"
#include "cosplan/io.hpp"

namespace cosplan {

void GridSpec::validate() const {
  if (!(resolution > 0.0)) throw ConfigError("grid resolution must be > 0");
  if (width <= 0 || height <= 0) throw ConfigError("grid width and height must be > 0");
  if (!(human_height >= 0.0)) throw ConfigError("human height must be >= 0");
  if (!(inflation_radius >= 0.0)) throw ConfigError("inflation radius must be >= 0");
}

GridSpec GridSpec::covering(const Vec2& lo, const Vec2& hi, double resolution, double margin) {
  GridSpec s;
  s.resolution = resolution;
  s.origin = lo.array() - margin;
  const Vec2 span = (hi - lo).array() + 2.0 * margin;
  s.width = std::max(1, static_cast<int>(std::ceil(span.x() / resolution - 1e-9)));
  s.height = std::max(1, static_cast<int>(std::ceil(span.y() / resolution - 1e-9)));
  return s;
}

nlohmann::json grid_spec_to_json(const GridSpec& s) {
  return {{"resolution", s.resolution},
          {"origin", {s.origin.x(), s.origin.y()}},
          {"width", s.width},
          {"height", s.height},
          {"ground_z", s.ground_z},
          {"human_height", s.human_height},
          {"inflation_radius", s.inflation_radius},
          {"mask_values", {{"free", 0}, {"raw_occupied", 128}, {"inflated_occupied", 255}}},
          {"row_order", "north_up"}};
}

GridSpec grid_spec_from_json(const nlohmann::json& doc) {
  try {
    GridSpec s;
    s.resolution = doc.at("resolution").get<double>();
    s.origin = Vec2(doc.at("origin").at(0).get<double>(), doc.at("origin").at(1).get<double>());
    s.width = doc.at("width").get<int>();
    s.height = doc.at("height").get<int>();
    s.ground_z = doc.value("ground_z", 0.0);
    s.human_height = doc.value("human_height", 2.0);
    s.inflation_radius = doc.value("inflation_radius", 0.5);
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("grid meta: ") + e.what());
  }
}

std::size_t OccupancyGrid::raw_count() const {
  return static_cast<std::size_t>(std::count(raw_occupied.begin(), raw_occupied.end(), 1));
}

std::size_t OccupancyGrid::inflated_count() const {
  return static_cast<std::size_t>(std::count(inflated_occupied.begin(), inflated_occupied.end(), 1));
}

std::vector<std::size_t> label_components(const GridSpec& spec, const std::vector<std::uint8_t>& occupied,
                                          std::vector<std::int32_t>& labels) {
  labels.assign(spec.cell_count(), -1);
  std::vector<std::size_t> sizes;
  std::vector<Cell> stack;
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const std::size_t i = spec.index({x, y});
      if (occupied[i] || labels[i] >= 0) continue;
      const auto id = static_cast<std::int32_t>(sizes.size());
      std::size_t count = 0;
      labels[i] = id;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        ++count;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const Cell n{c.x + dx, c.y + dy};
            if (!spec.in_bounds(n)) continue;
            const std::size_t j = spec.index(n);
            if (occupied[j] || labels[j] >= 0) continue;
            labels[j] = id;
            stack.push_back(n);
          }
      }
      sizes.push_back(count);
    }
  }
  return sizes;
}

OccupancyGrid build_occupancy(const BoxMap& map, const GridSpec& spec, std::size_t max_cells) {
  spec.validate();
  if (spec.cell_count() > max_cells)
    throw ResourceError("occupancy grid " + std::to_string(spec.width) + "x" + std::to_string(spec.height) +
                        " exceeds the cell budget of " + std::to_string(max_cells));
  OccupancyGrid g;
  g.spec = spec;
  g.raw_occupied.assign(spec.cell_count(), 0);

  const double zlo = spec.ground_z, zhi = spec.ground_z + spec.human_height;
  const double r = spec.resolution;
  for (const auto& b : map.boxes()) {
    const Aabb& a = b.aabb;
    if (!(std::min(a.hi.z(), zhi) - std::max(a.lo.z(), zlo) > 0.0)) continue;
    // Cells whose open interior meets the footprint.
    const int x0 = std::max(0, static_cast<int>(std::floor((a.lo.x() - spec.origin.x()) / r)));
    const int y0 = std::max(0, static_cast<int>(std::floor((a.lo.y() - spec.origin.y()) / r)));
    const int x1 = std::min(spec.width - 1, static_cast<int>(std::ceil((a.hi.x() - spec.origin.x()) / r)) - 1);
    const int y1 = std::min(spec.height - 1, static_cast<int>(std::ceil((a.hi.y() - spec.origin.y()) / r)) - 1);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) g.raw_occupied[spec.index({x, y})] = 1;
  }

  g.inflated_occupied = g.raw_occupied;
  const double rc = spec.inflation_radius / r;
  const int reach = static_cast<int>(std::floor(rc + 1e-9));
  if (reach > 0) {
    std::vector<Cell> disk;
    for (int dy = -reach; dy <= reach; ++dy)
      for (int dx = -reach; dx <= reach; ++dx)
        if ((dx != 0 || dy != 0) && dx * dx + dy * dy <= rc * rc + 1e-9) disk.push_back({dx, dy});
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x) {
        if (!g.raw_occupied[spec.index({x, y})]) continue;
        for (const Cell& d : disk) {
          const Cell n{x + d.x, y + d.y};
          if (spec.in_bounds(n)) g.inflated_occupied[spec.index(n)] = 1;
        }
      }
  }
  g.component_sizes = label_components(spec, g.inflated_occupied, g.component_labels);
  return g;
}

OccupancyGrid free_space_regions(OccupancyGrid grid, const RoiPolygon* roi, std::size_t min_component_cells) {
  const GridSpec& s = grid.spec;
  if (roi) {
    roi->validate();
    for (int y = 0; y < s.height; ++y)
      for (int x = 0; x < s.width; ++x) {
        const std::size_t i = s.index({x, y});
        if (!grid.inflated_occupied[i] && !roi->contains(s.cell_center({x, y}))) grid.inflated_occupied[i] = 1;
      }
  }
  auto sizes = label_components(s, grid.inflated_occupied, grid.component_labels);
  bool dropped = false;
  for (std::size_t i = 0; i < grid.component_labels.size(); ++i) {
    const auto l = grid.component_labels[i];
    if (l >= 0 && sizes[static_cast<std::size_t>(l)] < min_component_cells) {
      grid.inflated_occupied[i] = 1;
      dropped = true;
    }
  }
  grid.component_sizes = dropped ? label_components(s, grid.inflated_occupied, grid.component_labels) : sizes;
  return grid;
}

std::vector<std::uint8_t> grid_mask_bytes(const OccupancyGrid& g) {
  std::vector<std::uint8_t> out(g.spec.cell_count(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (g.raw_occupied[i])
      out[i] = 128;
    else if (g.inflated_occupied[i])
      out[i] = 255;
  }
  return out;
}

namespace {

void png_append(png_structp png, png_bytep data, png_size_t len) {
  auto* buf = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  buf->insert(buf->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

}  // namespace

std::vector<std::uint8_t> encode_grid_mask_png(const OccupancyGrid& g) {
  const auto bytes = grid_mask_bytes(g);
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("PNG encoding failed");
  }
  png_set_write_fn(png, &out, png_append, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(g.spec.width), static_cast<png_uint_32>(g.spec.height), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int row = 0; row < g.spec.height; ++row) {
    const int y = g.spec.height - 1 - row;
    png_write_row(png, bytes.data() + static_cast<std::size_t>(y) * g.spec.width);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void write_grid_mask_png(const OccupancyGrid& grid, const std::filesystem::path& path) {
  const auto png = encode_grid_mask_png(grid);
  write_text_atomic(path, std::string_view(reinterpret_cast<const char*>(png.data()), png.size()));
}

}  // namespace cosplan
