#include "hetree/view.h"

#include <algorithm>

#include "hetree/tree_json.h"

namespace hetree {

using nlohmann::json;

namespace {

json case_json(const AdaptationCase& c) {
  return {{"kind", adapt_kind_name(c.kind)}, {"k", c.k}};
}

}  // namespace

json view_json(const ExplorationSession& session) {
  const HETree& t = session.tree();
  const RenderedSet& cur = session.current();
  json elements = json::array();
  std::optional<NodeId> focus;
  if (cur.kind == RenderedSet::Kind::kObjects) {
    focus = cur.focus_leaf;
    for (ObjectRef r : t.node(*cur.focus_leaf).items) {
      elements.push_back({{"subject", t.object(r).subject}, {"value", t.value(r)}});
    }
  } else {
    for (NodeId id : cur.nodes) {
      const Node& n = t.node(id);
      elements.push_back({{"id", id},
                          {"height", n.height},
                          {"interval", interval_json(n.interval)},
                          {"stats", stats_json(n.stats)},
                          {"child_count", n.children.size()}});
    }
    const Node& first = t.node(cur.nodes.front());
    focus = first.parent ? *first.parent : cur.nodes.front();
  }
  std::vector<Interval> path;
  NodeId top = *focus;
  for (std::optional<NodeId> n = focus; n; n = t.node(*n).parent) {
    path.push_back(t.node(*n).interval);
    top = *n;
  }
  // Ancestors an incremental session has not built yet.
  if (const IcoState* ico = session.ico()) {
    GridPos p = *ico->position(top);
    while (p.height < ico->shape().height()) {
      p = {p.height + 1, p.index / ico->shape().degree()};
      path.push_back(ico->interval_of(p));
    }
  }
  std::reverse(path.begin(), path.end());
  json crumbs = json::array();
  for (const Interval& iv : path) crumbs.push_back(interval_json(iv));
  return {{"kind", cur.kind == RenderedSet::Kind::kObjects ? "objects" : "nodes"},
          {"scenario", scenario_name(session.starting_point().scenario)},
          {"value_kind", value_kind_name(t.dataset().kind())},
          {"mode", session.incremental() ? "incremental" : "full"},
          {"params", params_json(t.params())},
          {"elements", std::move(elements)},
          {"breadcrumb", std::move(crumbs)},
          {"counters", counters_json(session.counters())},
          {"last_step", counters_json(session.last_step())}};
}

json report_json(const AdaptationReport& r) {
  return {{"requested", case_json(r.requested)},
          {"executed", case_json(r.executed)},
          {"leaves_new", r.leaves_new},
          {"leaves_derived", r.leaves_derived},
          {"internals_new", r.internals_new},
          {"internals_derived", r.internals_derived},
          {"stats_leaves_new", r.stats_leaves_new},
          {"stats_leaves_derived", r.stats_leaves_derived},
          {"stats_internals_new", r.stats_internals_new},
          {"stats_internals_derived", r.stats_internals_derived},
          {"nodes_removed", r.nodes_removed},
          {"m", r.m},
          {"e", r.e},
          {"r", r.r},
          {"counters", counters_json(r.counters)},
          {"new_root", r.new_root}};
}

}  // namespace hetree
