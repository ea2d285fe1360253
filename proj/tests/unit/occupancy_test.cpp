// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/occupancy.hpp"

#include <gtest/gtest.h>
#include <png.h>

#include <deque>
#include <nlohmann/json.hpp>

#include "cosplan/errors.hpp"
#include "cosplan/polygon.hpp"
#include "cosplan/rng.hpp"
#include "fixtures.hpp"

namespace cosplan {
namespace {

using testing::make_map;

GridSpec small_spec(int w, int h, double res = 0.5) {
  GridSpec s;
  s.resolution = res;
  s.width = w;
  s.height = h;
  return s;
}

// Raw oracle: a cell is occupied iff its open square overlaps a box footprint
// with positive area, for boxes that reach into the pedestrian height band.
std::vector<std::uint8_t> oracle_raw(const std::vector<Aabb>& boxes, const GridSpec& s) {
  std::vector<std::uint8_t> occ(s.cell_count(), 0);
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      const double cx0 = s.origin.x() + x * s.resolution, cy0 = s.origin.y() + y * s.resolution;
      for (const auto& b : boxes) {
        const bool band = std::min(b.hi.z(), s.ground_z + s.human_height) > std::max(b.lo.z(), s.ground_z);
        const bool ox = std::min(b.hi.x(), cx0 + s.resolution) > std::max(b.lo.x(), cx0);
        const bool oy = std::min(b.hi.y(), cy0 + s.resolution) > std::max(b.lo.y(), cy0);
        if (band && ox && oy) occ[s.index({x, y})] = 1;
      }
    }
  return occ;
}

std::size_t oracle_components(const GridSpec& s, const std::vector<std::uint8_t>& occ) {
  std::vector<bool> seen(occ.size(), false);
  std::size_t count = 0;
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (occ[i] || seen[i]) continue;
    ++count;
    std::deque<Cell> q{{static_cast<int>(i % s.width), static_cast<int>(i / s.width)}};
    seen[i] = true;
    while (!q.empty()) {
      const Cell c = q.front();
      q.pop_front();
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const Cell n{c.x + dx, c.y + dy};
          if (!s.in_bounds(n) || occ[s.index(n)] || seen[s.index(n)]) continue;
          seen[s.index(n)] = true;
          q.push_back(n);
        }
    }
  }
  return count;
}

TEST(Occupancy, RawAndInflatedMatchOracle) {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    GridSpec s = small_spec(60, 50);
    s.inflation_radius = rng.uniform(0.0, 1.6);
    std::vector<Aabb> boxes;
    for (int i = 0; i < 6; ++i) {
      const Vec3 lo(rng.uniform(-2, 28), rng.uniform(-2, 23), rng.uniform(-1, 3));
      boxes.push_back({lo, lo + Vec3(rng.uniform(0.2, 5), rng.uniform(0.2, 5), rng.uniform(0.5, 5))});
    }
    const OccupancyGrid g = build_occupancy(make_map(boxes), s);
    ASSERT_EQ(g.raw_occupied, oracle_raw(boxes, s)) << "trial " << trial;

    const double rc = s.inflation_radius / s.resolution;
    for (int y = 0; y < s.height; ++y)
      for (int x = 0; x < s.width; ++x) {
        bool want = false;
        for (int yy = 0; yy < s.height && !want; ++yy)
          for (int xx = 0; xx < s.width && !want; ++xx)
            want = g.raw_occupied[s.index({xx, yy})] && (x - xx) * (x - xx) + (y - yy) * (y - yy) <= rc * rc + 1e-9;
        ASSERT_EQ(g.inflated_occupied[s.index({x, y})] != 0, want) << x << "," << y << " trial " << trial;
      }
    EXPECT_EQ(g.component_sizes.size(), oracle_components(s, g.inflated_occupied));
  }
}

TEST(Occupancy, IgnoresBoxesOutsideHeightBand) {
  const GridSpec s = small_spec(20, 20);
  const auto canopy = make_map({Aabb{Vec3(2, 2, 2.0), Vec3(6, 6, 8)}});  // starts at the band top
  EXPECT_EQ(build_occupancy(canopy, s).raw_count(), 0u);
  const auto sunk = make_map({Aabb{Vec3(2, 2, -4), Vec3(6, 6, 0)}});
  EXPECT_EQ(build_occupancy(sunk, s).raw_count(), 0u);
}

TEST(Occupancy, CellBudget) {
  EXPECT_THROW(build_occupancy(BoxMap{}, small_spec(1000, 1000), 999'999), ResourceError);
  EXPECT_THROW(build_occupancy(BoxMap{}, small_spec(0, 10)), ConfigError);
}

TEST(Occupancy, RoiHoleExcludesExactlyItsCells) {
  // 50 x 50 cells of 0.5 m; outer [2, 23]^2 holds 42 x 42 cell centers and
  // the hole [10, 15]^2 holds 10 x 10.
  const GridSpec s = small_spec(50, 50);
  const RoiPolygon roi = load_roi_file(std::filesystem::path(COSPLAN_FIXTURE_DIR) / "roi_square_hole.json");
  const OccupancyGrid g = free_space_regions(build_occupancy(BoxMap{}, s), &roi, 1);
  std::size_t free = 0;
  for (auto v : g.inflated_occupied) free += v == 0;
  EXPECT_EQ(free, 42u * 42u - 10u * 10u);
  EXPECT_FALSE(g.is_free(s.to_cell({12.5, 12.5})));
  EXPECT_TRUE(g.is_free(s.to_cell({5.0, 5.0})));
}

TEST(Occupancy, SmallComponentsAreFolded) {
  GridSpec s = small_spec(40, 20);
  s.inflation_radius = 0.0;
  // A wall splits the grid into 10 columns on the left and 29 on the right.
  const auto map = make_map({Aabb{Vec3(5, -1, 0), Vec3(5.5, 11, 3)}});
  const OccupancyGrid g = free_space_regions(build_occupancy(map, s), nullptr, 250);
  ASSERT_EQ(g.component_sizes.size(), 1u);
  EXPECT_EQ(g.component_sizes[0], 29u * 20u);
  EXPECT_EQ(g.label({2, 2}), -1);
}

std::vector<std::uint8_t> decode_png(const std::vector<std::uint8_t>& bytes, png_uint_32& w, png_uint_32& h) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) return {};
  img.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> out(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.data(), 0, nullptr)) return {};
  w = img.width;
  h = img.height;
  return out;
}

TEST(Occupancy, MaskPngIsNorthUp) {
  GridSpec s = small_spec(8, 6);
  s.inflation_radius = 0.0;
  // One raw cell at grid (1, 0): the bottom image row.
  const OccupancyGrid g = build_occupancy(make_map({Aabb{Vec3(0.6, 0.1, 0), Vec3(0.9, 0.4, 1)}}), s);
  png_uint_32 w = 0, h = 0;
  const auto px = decode_png(encode_grid_mask_png(g), w, h);
  ASSERT_EQ(w, 8u);
  ASSERT_EQ(h, 6u);
  EXPECT_EQ(px[5 * 8 + 1], 128);
  EXPECT_EQ(px[0 * 8 + 1], 0);
}

TEST(Occupancy, GridSpecJsonAndCovering) {
  const GridSpec c = GridSpec::covering({-3.2, 1.0}, {7.1, 4.0}, 0.5, 1.0);
  EXPECT_LE(c.origin.x(), -4.2);
  EXPECT_GE(c.origin.x() + c.width * c.resolution, 8.1);
  EXPECT_GE(c.origin.y() + c.height * c.resolution, 5.0);
  const GridSpec back = grid_spec_from_json(grid_spec_to_json(c));
  EXPECT_EQ(grid_spec_to_json(back), grid_spec_to_json(c));
}

}  // namespace
}  // namespace cosplan
