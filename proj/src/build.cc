#include "hetree/build.h"

#include <numeric>

#include "hetree/error.h"

namespace hetree {

TreeParams derive_params(const Dataset& data, Variant variant, std::size_t leaves,
                         std::size_t degree) {
  if (leaves < 1) throw Error(ErrorCode::kParameter, "number of leaves must be >= 1");
  if (degree < 2) throw Error(ErrorCode::kParameter, "degree must be >= 2");
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "dataset is empty");
  TreeParams p;
  p.variant = variant;
  p.leaves = leaves;
  p.degree = degree;
  if (variant == Variant::kC) {
    if (data.size() < leaves) {
      throw Error(ErrorCode::kParameter,
                  "HETree-C needs at least as many objects as leaves (" +
                      std::to_string(data.size()) + " < " + std::to_string(leaves) + ")");
    }
    p.lambda = (data.size() + leaves - 1) / leaves;
  } else {
    if (!(data.minv() < data.maxv())) {
      throw Error(ErrorCode::kDegenerateRange,
                  "all values are equal; HETree-R needs a non-empty range, use variant C");
    }
    p.rho = (data.maxv() - data.minv()) / static_cast<double>(leaves);
  }
  return p;
}

std::vector<std::size_t> c_leaf_offsets(std::size_t count, std::size_t leaves) {
  std::size_t lambda = (count + leaves - 1) / leaves;
  std::size_t k = leaves - (lambda * leaves - count);
  std::vector<std::size_t> offsets(leaves + 1);
  for (std::size_t i = 0; i <= leaves; ++i) {
    offsets[i] = i <= k ? i * lambda : k * lambda + (i - k) * (lambda - 1);
  }
  return offsets;
}

NodeStats stats_of_items(const HETree& tree, std::span<const ObjectRef> items) {
  StatsAccumulator acc;
  for (ObjectRef r : items) acc.add(tree.value(r));
  return acc.result();
}

NodeStats compute_leaf_stats(const HETree& tree, NodeId leaf) {
  return stats_of_items(tree, tree.node(leaf).items);
}

Interval hull(const HETree& tree, const std::vector<NodeId>& nodes) {
  const Interval& first = tree.node(nodes.front()).interval;
  const Interval& last = tree.node(nodes.back()).interval;
  return {first.lower, last.upper, last.upper_closed};
}

std::vector<NodeId> construct_leaves_c(HETree& tree, std::span<const ObjectRef> items,
                                       std::size_t leaves, BuildCounters& counters) {
  auto offsets = c_leaf_offsets(items.size(), leaves);
  std::vector<NodeId> out;
  out.reserve(leaves);
  for (std::size_t i = 0; i < leaves; ++i) {
    Node n;
    n.items.assign(items.begin() + offsets[i], items.begin() + offsets[i + 1]);
    n.interval = {tree.value(n.items.front()), tree.value(n.items.back()), true};
    n.stats = stats_of_items(tree, n.items);
    counters.objects_scanned += n.items.size();
    ++counters.stats_from_scratch;
    ++counters.nodes_built;
    ++counters.leaves_built;
    out.push_back(tree.add_node(std::move(n)));
  }
  return out;
}

std::vector<NodeId> construct_leaves_r(HETree& tree, std::span<const ObjectRef> items,
                                       const RangeGrid& grid, BuildCounters& counters) {
  std::vector<Node> leaves(grid.leaves());
  for (std::size_t i = 0; i < leaves.size(); ++i) leaves[i].interval = grid.span(i, i + 1);
  for (ObjectRef r : items) leaves[grid.leaf_of(tree.value(r))].items.push_back(r);
  std::vector<NodeId> out;
  out.reserve(leaves.size());
  for (Node& n : leaves) {
    n.stats = stats_of_items(tree, n.items);
    counters.objects_scanned += n.items.size();
    ++counters.stats_from_scratch;
    ++counters.nodes_built;
    ++counters.leaves_built;
    out.push_back(tree.add_node(std::move(n)));
  }
  return out;
}

std::vector<NodeId> build_parent_level(HETree& tree, const std::vector<NodeId>& level,
                                       std::size_t degree, BuildCounters& counters,
                                       const LevelStatsFn& stats_fn) {
  std::size_t parents = (level.size() + degree - 1) / degree;
  std::vector<NodeId> out;
  out.reserve(parents);
  std::vector<NodeStats> parts;
  for (std::size_t p = 0; p < parents; ++p) {
    std::vector<NodeId> children(level.begin() + p * degree,
                                 level.begin() + std::min(level.size(), (p + 1) * degree));
    Node n;
    n.interval = hull(tree, children);
    n.height = tree.node(children.front()).height + 1;
    if (stats_fn) {
      n.stats = stats_fn(p, children);
    } else {
      parts.clear();
      for (NodeId c : children) parts.push_back(tree.node(c).stats);
      n.stats = merge_stats(parts);
    }
    ++counters.stats_aggregated;
    ++counters.nodes_built;
    NodeId id = tree.add_node(std::move(n));
    tree.link(id, children);
    out.push_back(id);
  }
  return out;
}

NodeId constr_internal_nodes(HETree& tree, std::vector<NodeId> level, std::size_t degree,
                             BuildCounters& counters,
                             const LevelStatsFn& first_level_stats) {
  if (level.empty()) throw Error(ErrorCode::kInvariant, "no nodes to group");
  bool first = true;
  while (true) {
    level = build_parent_level(tree, level, degree, counters,
                               first ? first_level_stats : LevelStatsFn{});
    first = false;
    if (level.size() == 1) return level.front();
  }
}

namespace {

void check_sorted(const std::shared_ptr<const Dataset>& data) {
  if (!data || !data->sorted()) {
    throw Error(ErrorCode::kPrecondition, "construction needs a sorted dataset");
  }
}

std::vector<ObjectRef> all_items(const Dataset& data) {
  std::vector<ObjectRef> items(data.size());
  std::iota(items.begin(), items.end(), ObjectRef{0});
  return items;
}

}  // namespace

BuildResult build_hetree_c(std::shared_ptr<const Dataset> sorted, std::size_t leaves,
                           std::size_t degree) {
  check_sorted(sorted);
  TreeParams p = derive_params(*sorted, Variant::kC, leaves, degree);
  BuildResult r{HETree(sorted, p, BuildMode::kFull), {}};
  auto items = all_items(*sorted);
  auto level = construct_leaves_c(r.tree, items, leaves, r.counters);
  r.tree.set_root(constr_internal_nodes(r.tree, std::move(level), degree, r.counters));
  return r;
}

BuildResult build_hetree_r(std::shared_ptr<const Dataset> sorted, std::size_t leaves,
                           std::size_t degree) {
  check_sorted(sorted);
  TreeParams p = derive_params(*sorted, Variant::kR, leaves, degree);
  BuildResult r{HETree(sorted, p, BuildMode::kFull), {}};
  auto items = all_items(*sorted);
  RangeGrid grid(sorted->minv(), sorted->maxv(), leaves);
  auto level = construct_leaves_r(r.tree, items, grid, r.counters);
  r.tree.set_root(constr_internal_nodes(r.tree, std::move(level), degree, r.counters));
  return r;
}

BuildResult build_hetree(std::shared_ptr<const Dataset> sorted, const TreeParams& params) {
  return params.variant == Variant::kC
             ? build_hetree_c(std::move(sorted), params.leaves, params.degree)
             : build_hetree_r(std::move(sorted), params.leaves, params.degree);
}

}  // namespace hetree
