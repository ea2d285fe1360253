// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cosplan/boxmap.hpp"

namespace cosplan {

enum class TreeStrategy { kFixed, kAdaptive };

struct SimplifyConfig {
  /// Categories absent from the map are never merged.
  std::map<std::string, double> merge_tolerance{{"Vegetation", 2.0}, {"Buildings", 5.0}};
  double cut_height = 2.0;
  double canopy_lift = 0.5;
  double ground_z = 0.0;
  double nested_tolerance = 0.01;
  std::string vegetation_label = "Vegetation";

  TreeStrategy tree_strategy = TreeStrategy::kFixed;
  // Adaptive cropping: cut at split_z, then slice the canopy into layers no
  // taller than adaptive_height with xy snapped outward to cell_size.
  double split_z = 5.0;
  double adaptive_height = 5.0;
  double cell_size = 0.5;

  /// Throws ConfigError on negative tolerances or non-positive heights.
  void validate() const;
};

nlohmann::json simplify_config_to_json(const SimplifyConfig& cfg);
SimplifyConfig simplify_config_from_json(const nlohmann::json& doc, SimplifyConfig base = {});

/// Parses "v=2.0,b=5.0" or "Vegetation=2,Walls=1". The single letters v and
/// b stand for Vegetation and Buildings.
std::map<std::string, double> parse_merge_tolerances(std::string_view spec);

TreeStrategy parse_tree_strategy(std::string_view name);

struct PassReport {
  std::string name;
  std::size_t before = 0;
  std::size_t after = 0;
  std::map<std::string, std::size_t> before_by_category;
  std::map<std::string, std::size_t> after_by_category;
  double wall_ms = 0.0;
};

struct SimplifyReport {
  std::vector<PassReport> passes;

  [[nodiscard]] nlohmann::json to_json() const;
};

BoxMap merge_adjacent(const BoxMap& map, const SimplifyConfig& cfg);
BoxMap crop_trees(const BoxMap& map, const SimplifyConfig& cfg);
BoxMap remove_below_ground(const BoxMap& map, const SimplifyConfig& cfg);
BoxMap prune_nested(const BoxMap& map, const SimplifyConfig& cfg);

/// merge, crop_tree, crop_below_ground, prune_nested.
const std::vector<std::string>& default_pass_order();

/// Runs the named passes in order. Accepted names: merge, crop / crop_tree,
/// below_ground / crop_below_ground, prune / prune_nested. Throws
/// ConfigError for anything else.
std::pair<BoxMap, SimplifyReport> simplify_pipeline(const BoxMap& map, const SimplifyConfig& cfg,
                                                    const std::vector<std::string>& pass_order);

}  // namespace cosplan
