#include "hetree/tree_json.h"

namespace hetree {

using nlohmann::json;

json interval_json(const Interval& interval) {
  return {{"lower", interval.lower},
          {"upper", interval.upper},
          {"upper_closed", interval.upper_closed}};
}

json stats_json(const NodeStats& s) {
  if (s.empty()) return nullptr;
  return {{"count", s.count}, {"mean", s.mean}, {"variance", s.variance},
          {"min", s.min},     {"max", s.max}};
}

json counters_json(const BuildCounters& c) {
  return {{"nodes_built", c.nodes_built},
          {"leaves_built", c.leaves_built},
          {"stats_from_scratch", c.stats_from_scratch},
          {"stats_aggregated", c.stats_aggregated},
          {"objects_scanned", c.objects_scanned}};
}

json params_json(const TreeParams& p) {
  json j = {{"variant", variant_name(p.variant)}, {"leaves", p.leaves}, {"degree", p.degree}};
  if (p.variant == Variant::kC) {
    j["lambda"] = p.lambda;
  } else {
    j["rho"] = p.rho;
  }
  return j;
}

json tree_json(const HETree& tree, bool include_objects) {
  json nodes = json::array();
  for (const auto& level : tree.levels()) {
    for (NodeId id : level) {
      const Node& n = tree.node(id);
      json jn = {{"id", n.id},
                 {"height", n.height},
                 {"interval", interval_json(n.interval)},
                 {"stats", stats_json(n.stats)},
                 {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                 {"children", n.children}};
      if (include_objects && n.is_leaf()) {
        json objs = json::array();
        for (ObjectRef r : n.items) {
          objs.push_back({{"subject", tree.object(r).subject}, {"value", tree.value(r)}});
        }
        jn["objects"] = std::move(objs);
      }
      nodes.push_back(std::move(jn));
    }
  }
  return {{"schema", kTreeSchemaVersion},
          {"params", params_json(tree.params())},
          {"mode", tree.mode() == BuildMode::kFull ? "full" : "incremental"},
          {"kind", value_kind_name(tree.dataset().kind())},
          {"predicate", tree.dataset().predicate()},
          {"root", tree.root() ? json(*tree.root()) : json(nullptr)},
          {"height", tree.height()},
          {"nodes", std::move(nodes)}};
}

}  // namespace hetree
