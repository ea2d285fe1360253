// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/synthetic.hpp"

#include "cosplan/errors.hpp"
#include "cosplan/rng.hpp"

namespace cosplan {

BoxMap synthetic_city(const SyntheticCityConfig& cfg) {
  if (cfg.blocks_x < 1 || cfg.blocks_y < 1 || !(cfg.block_size > 4.0) || !(cfg.street_width > 0.0) ||
      !(cfg.min_height > 0.0) || !(cfg.max_height >= cfg.min_height) || cfg.trees_per_block < 0)
    throw ConfigError("invalid synthetic city config");
  SplitMix64 rng(derive_seed(cfg.seed, 0xC17));
  std::vector<BoxRecord> boxes;
  std::uint64_t id = 1;
  auto add = [&](const char* label, int sem, const char* color, Vec3 lo, Vec3 hi) {
    boxes.push_back(BoxRecord::from_aabb(label, sem, color, id++, Aabb{lo, hi}));
  };
  const double pitch = cfg.block_size + cfg.street_width;
  for (int bx = 0; bx < cfg.blocks_x; ++bx) {
    for (int by = 0; by < cfg.blocks_y; ++by) {
      const double x0 = cfg.street_width + bx * pitch;
      const double y0 = cfg.street_width + by * pitch;
      const double x1 = x0 + cfg.block_size;
      const double y1 = y0 + cfg.block_size;
      // Split the block into one or two buildings along a random axis.
      if (rng.bernoulli(0.5)) {
        add("Buildings", 1, "#464646", {x0, y0, 0.0}, {x1, y1, rng.uniform(cfg.min_height, cfg.max_height)});
      } else {
        const double cut = rng.uniform(0.35, 0.65);
        const double gap = 1.0;
        if (rng.bernoulli(0.5)) {
          const double xm = x0 + cut * cfg.block_size;
          add("Buildings", 1, "#464646", {x0, y0, 0.0}, {xm - gap, y1, rng.uniform(cfg.min_height, cfg.max_height)});
          add("Buildings", 1, "#464646", {xm + gap, y0, 0.0}, {x1, y1, rng.uniform(cfg.min_height, cfg.max_height)});
        } else {
          const double ym = y0 + cut * cfg.block_size;
          add("Buildings", 1, "#464646", {x0, y0, 0.0}, {x1, ym - gap, rng.uniform(cfg.min_height, cfg.max_height)});
          add("Buildings", 1, "#464646", {x0, ym + gap, 0.0}, {x1, y1, rng.uniform(cfg.min_height, cfg.max_height)});
        }
      }
      // Street trees sit just outside the block's south edge.
      for (int t = 0; t < cfg.trees_per_block; ++t) {
        const double cx = x0 + (t + 0.5) * cfg.block_size / cfg.trees_per_block;
        const double cy = y0 - 2.5;
        const double h = rng.uniform(4.0, 7.0);
        add("Vegetation", 9, "#6b8e23", {cx - 0.3, cy - 0.3, 0.0}, {cx + 0.3, cy + 0.3, h});
        add("Vegetation", 9, "#6b8e23", {cx - 2.0, cy - 2.0, h}, {cx + 2.0, cy + 2.0, h + rng.uniform(3.0, 5.0)});
      }
    }
  }
  return BoxMap(std::move(boxes));
}

}  // namespace cosplan
