// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "cosplan/boxmap.hpp"

namespace cosplan {

/// Block-grid town: buildings inside each block, street trees (trunk plus
/// canopy) along the block edges. Streets stay free at pedestrian height.
struct SyntheticCityConfig {
  int blocks_x = 3;
  int blocks_y = 3;
  double block_size = 40.0;
  double street_width = 16.0;
  double min_height = 12.0;
  double max_height = 55.0;
  int trees_per_block = 4;
  std::uint64_t seed = 0;
};

/// Deterministic in the config. The street network spans
/// [0, blocks * (block + street) + street] on both axes.
BoxMap synthetic_city(const SyntheticCityConfig& cfg);

}  // namespace cosplan
