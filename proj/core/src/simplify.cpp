// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cosplan/simplify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <nlohmann/json.hpp>

#include "cosplan/errors.hpp"

namespace cosplan {

void SimplifyConfig::validate() const {
  for (const auto& [cat, tol] : merge_tolerance)
    if (!(tol >= 0.0)) throw ConfigError("merge tolerance for " + cat + " must be >= 0");
  if (!(cut_height > 0.0)) throw ConfigError("cut height must be > 0");
  if (!(canopy_lift >= 0.0)) throw ConfigError("canopy lift must be >= 0");
  if (!(nested_tolerance >= 0.0)) throw ConfigError("nested tolerance must be >= 0");
  if (!std::isfinite(ground_z)) throw ConfigError("ground_z must be finite");
  if (tree_strategy == TreeStrategy::kAdaptive) {
    if (!(split_z > 0.0) || !(adaptive_height > 0.0) || !(cell_size > 0.0))
      throw ConfigError("adaptive crop needs positive split_z, adaptive_height and cell_size");
  }
}

std::map<std::string, double> parse_merge_tolerances(std::string_view spec) {
  std::map<std::string, double> out;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t end = spec.find(',', pos);
    if (end == std::string_view::npos) end = spec.size();
    const std::string_view item = spec.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError("merge spec item without '=': " + std::string(item));
    std::string key(item.substr(0, eq));
    if (key == "v") key = "Vegetation";
    if (key == "b") key = "Buildings";
    double value = 0.0;
    try {
      std::size_t used = 0;
      const std::string num(item.substr(eq + 1));
      value = std::stod(num, &used);
      if (used != num.size()) throw std::invalid_argument(num);
    } catch (const std::exception&) {
      throw ConfigError("bad merge tolerance: " + std::string(item));
    }
    if (!(value >= 0.0)) throw ConfigError("merge tolerance must be >= 0: " + std::string(item));
    out[key] = value;
  }
  return out;
}

TreeStrategy parse_tree_strategy(std::string_view name) {
  if (name == "fixed") return TreeStrategy::kFixed;
  if (name == "adaptive") return TreeStrategy::kAdaptive;
  throw ConfigError("unknown tree strategy '" + std::string(name) + "' (fixed|adaptive)");
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a), b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

struct Group {
  Aabb box;
  std::vector<std::size_t> members;  // indices into the input map, ascending
};

// One round of gap-adjacency clustering. Returns true when any groups fused.
bool cluster_round(std::vector<Group>& groups, double tol) {
  const std::size_t n = groups.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return groups[a].box.lo.x() < groups[b].box.lo.x();
  });
  UnionFind uf(n);
  bool fused = false;
  for (std::size_t oi = 0; oi < n; ++oi) {
    const Aabb& a = groups[order[oi]].box;
    for (std::size_t oj = oi + 1; oj < n; ++oj) {
      const Aabb& b = groups[order[oj]].box;
      if (b.lo.x() > a.hi.x() + tol) break;
      if ((aabb_gap(a, b).array() <= tol).all()) fused |= uf.unite(order[oi], order[oj]);
    }
  }
  if (!fused) return false;
  std::vector<Group> next;
  std::vector<std::size_t> slot(n, SIZE_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = uf.find(i);
    if (slot[r] == SIZE_MAX) {
      slot[r] = next.size();
      next.push_back(groups[i]);
    } else {
      Group& g = next[slot[r]];
      g.box.expand(groups[i].box);
      g.members.insert(g.members.end(), groups[i].members.begin(), groups[i].members.end());
    }
  }
  for (auto& g : next) std::sort(g.members.begin(), g.members.end());
  groups = std::move(next);
  return true;
}

}  // namespace

BoxMap merge_adjacent(const BoxMap& map, const SimplifyConfig& cfg) {
  const auto& in = map.boxes();
  std::map<std::string, std::vector<Group>> by_cat;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (cfg.merge_tolerance.count(in[i].label)) by_cat[in[i].label].push_back({in[i].aabb, {i}});
  }

  // Fusing two groups grows their hull, which can bring it within tolerance
  // of a third group, so rounds repeat until nothing changes. This makes the
  // pass idempotent.
  std::vector<const Group*> clusters;
  for (auto& [cat, groups] : by_cat) {
    const double tol = cfg.merge_tolerance.at(cat);
    while (cluster_round(groups, tol)) {
    }
    for (const auto& g : groups)
      if (g.members.size() > 1) clusters.push_back(&g);
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Group* a, const Group* b) { return a->members.front() < b->members.front(); });

  std::vector<const Group*> leader(in.size(), nullptr);
  std::vector<bool> absorbed(in.size(), false);
  for (const Group* g : clusters) {
    leader[g->members.front()] = g;
    for (std::size_t m : g->members) absorbed[m] = true;
  }

  std::uint64_t next_id = map.max_id();
  std::vector<BoxRecord> out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (const Group* g = leader[i]) {
      const BoxRecord& first = in[i];
      out.push_back(BoxRecord::from_aabb(first.label, first.semantic_id, first.color, ++next_id, g->box));
    } else if (!absorbed[i]) {
      out.push_back(in[i]);
    }
  }
  return BoxMap(std::move(out));
}

namespace {

BoxRecord with_aabb(const BoxRecord& src, std::uint64_t id, const Aabb& box) {
  BoxRecord r = BoxRecord::from_aabb(src.label, src.semantic_id, src.color, id, box);
  return r;
}

double snap_down(double v, double step) { return std::floor(v / step) * step; }
double snap_up(double v, double step) { return std::ceil(v / step) * step; }

}  // namespace

BoxMap crop_trees(const BoxMap& map, const SimplifyConfig& cfg) {
  const bool adaptive = cfg.tree_strategy == TreeStrategy::kAdaptive;
  const double cut = adaptive ? cfg.split_z : cfg.cut_height;
  std::uint64_t next_id = map.max_id();
  std::vector<BoxRecord> out;
  out.reserve(map.size());
  for (const auto& b : map.boxes()) {
    const Aabb& a = b.aabb;
    if (b.label != cfg.vegetation_label || !(a.lo.z() < cut && a.hi.z() > cut)) {
      out.push_back(b);
      continue;
    }
    Aabb trunk = a;
    trunk.lo.z() = std::max(a.lo.z(), cfg.ground_z);
    trunk.hi.z() = cut;
    if (trunk.hi.z() > trunk.lo.z()) out.push_back(with_aabb(b, b.id, trunk));

    Aabb canopy = a;
    canopy.lo.z() = cut + cfg.canopy_lift;
    canopy.hi.z() = a.hi.z() + cfg.canopy_lift;
    const bool trunk_kept = trunk.hi.z() > trunk.lo.z();
    if (!adaptive) {
      out.push_back(with_aabb(b, trunk_kept ? ++next_id : b.id, canopy));
      continue;
    }
    for (int k = 0; k < 2; ++k) {
      canopy.lo[k] = snap_down(canopy.lo[k], cfg.cell_size);
      canopy.hi[k] = snap_up(canopy.hi[k], cfg.cell_size);
    }
    const double span = canopy.hi.z() - canopy.lo.z();
    const int layers = std::max(1, static_cast<int>(std::ceil(span / cfg.adaptive_height - 1e-9)));
    const double step = span / layers;
    for (int l = 0; l < layers; ++l) {
      Aabb slice = canopy;
      slice.lo.z() = canopy.lo.z() + l * step;
      slice.hi.z() = l + 1 == layers ? canopy.hi.z() : canopy.lo.z() + (l + 1) * step;
      out.push_back(with_aabb(b, (trunk_kept || l > 0) ? ++next_id : b.id, slice));
    }
  }
  return BoxMap(std::move(out));
}

BoxMap remove_below_ground(const BoxMap& map, const SimplifyConfig& cfg) {
  std::vector<BoxRecord> out;
  out.reserve(map.size());
  for (const auto& b : map.boxes())
    if (!(b.center.z() + b.extent.z() < cfg.ground_z)) out.push_back(b);
  return BoxMap(std::move(out));
}

BoxMap prune_nested(const BoxMap& map, const SimplifyConfig& cfg) {
  const auto& in = map.boxes();
  const double eps = cfg.nested_tolerance;
  auto inside = [eps](const Aabb& inner, const Aabb& outer) {
    return (inner.lo.array() >= outer.lo.array() - eps).all() && (inner.hi.array() <= outer.hi.array() + eps).all();
  };

  std::map<std::string, std::vector<std::size_t>> by_cat;
  for (std::size_t i = 0; i < in.size(); ++i) by_cat[in[i].label].push_back(i);

  std::vector<bool> drop(in.size(), false);
  for (auto& [cat, idx] : by_cat) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return in[a].aabb.lo.x() < in[b].aabb.lo.x(); });
    for (std::size_t oi = 0; oi < idx.size(); ++oi) {
      const std::size_t i = idx[oi];
      const Aabb& ai = in[i].aabb;
      // A container must start no later than lo.x + eps; scan both sides of i.
      for (std::size_t oj = 0; oj < idx.size(); ++oj) {
        const std::size_t j = idx[oj];
        if (in[j].aabb.lo.x() > ai.lo.x() + eps) break;
        if (j == i || !inside(ai, in[j].aabb)) continue;
        // Mutual containment (equal within tolerance) keeps the lowest id.
        if (inside(in[j].aabb, ai) && in[i].id < in[j].id) continue;
        drop[i] = true;
        break;
      }
    }
  }
  std::vector<BoxRecord> out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i)
    if (!drop[i]) out.push_back(in[i]);
  return BoxMap(std::move(out));
}

const std::vector<std::string>& default_pass_order() {
  static const std::vector<std::string> order{"merge", "crop_tree", "crop_below_ground", "prune_nested"};
  return order;
}

std::pair<BoxMap, SimplifyReport> simplify_pipeline(const BoxMap& map, const SimplifyConfig& cfg,
                                                    const std::vector<std::string>& pass_order) {
  cfg.validate();
  using PassFn = BoxMap (*)(const BoxMap&, const SimplifyConfig&);
  std::vector<std::pair<std::string, PassFn>> plan;
  for (const auto& name : pass_order) {
    if (name == "merge" || name == "merge_adjacent")
      plan.emplace_back("merge", &merge_adjacent);
    else if (name == "crop" || name == "crop_tree" || name == "crop_trees")
      plan.emplace_back("crop_tree", &crop_trees);
    else if (name == "below_ground" || name == "crop_below_ground" || name == "remove_below_ground")
      plan.emplace_back("crop_below_ground", &remove_below_ground);
    else if (name == "prune" || name == "prune_nested")
      plan.emplace_back("prune_nested", &prune_nested);
    else
      throw ConfigError("unknown simplification pass '" + name + "'");
  }

  SimplifyReport report;
  BoxMap current = map;
  for (const auto& [name, fn] : plan) {
    PassReport row;
    row.name = name;
    row.before = current.size();
    row.before_by_category = current.category_counts();
    const auto t0 = std::chrono::steady_clock::now();
    current = fn(current, cfg);
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    row.after = current.size();
    row.after_by_category = current.category_counts();
    report.passes.push_back(std::move(row));
  }
  return {std::move(current), std::move(report)};
}

nlohmann::json SimplifyReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : passes) {
    rows.push_back({{"pass", p.name},
                    {"before", p.before},
                    {"after", p.after},
                    {"before_by_category", p.before_by_category},
                    {"after_by_category", p.after_by_category},
                    {"wall_ms", p.wall_ms}});
  }
  return {{"passes", rows}};
}

nlohmann::json simplify_config_to_json(const SimplifyConfig& c) {
  return {{"merge_tolerance", c.merge_tolerance},
          {"cut_height", c.cut_height},
          {"canopy_lift", c.canopy_lift},
          {"ground_z", c.ground_z},
          {"nested_tolerance", c.nested_tolerance},
          {"vegetation_label", c.vegetation_label},
          {"tree_strategy", c.tree_strategy == TreeStrategy::kFixed ? "fixed" : "adaptive"},
          {"split_z", c.split_z},
          {"adaptive_height", c.adaptive_height},
          {"cell_size", c.cell_size}};
}

SimplifyConfig simplify_config_from_json(const nlohmann::json& doc, SimplifyConfig c) {
  try {
    if (doc.contains("merge_tolerance")) c.merge_tolerance = doc["merge_tolerance"].get<std::map<std::string, double>>();
    c.cut_height = doc.value("cut_height", c.cut_height);
    c.canopy_lift = doc.value("canopy_lift", c.canopy_lift);
    c.ground_z = doc.value("ground_z", c.ground_z);
    c.nested_tolerance = doc.value("nested_tolerance", c.nested_tolerance);
    c.vegetation_label = doc.value("vegetation_label", c.vegetation_label);
    if (doc.contains("tree_strategy")) c.tree_strategy = parse_tree_strategy(doc["tree_strategy"].get<std::string>());
    c.split_z = doc.value("split_z", c.split_z);
    c.adaptive_height = doc.value("adaptive_height", c.adaptive_height);
    c.cell_size = doc.value("cell_size", c.cell_size);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("simplify config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace cosplan
