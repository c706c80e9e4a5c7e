#ifndef HETREE_BUILD_H_
#define HETREE_BUILD_H_

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "hetree/tree.h"

namespace hetree {

struct BuildResult {
  HETree tree;
  BuildCounters counters;
};

// Both builders expect a sorted dataset; they reject unsorted input.
BuildResult build_hetree_c(std::shared_ptr<const Dataset> sorted, std::size_t leaves,
                           std::size_t degree);
BuildResult build_hetree_r(std::shared_ptr<const Dataset> sorted, std::size_t leaves,
                           std::size_t degree);
// Dispatches on params.variant and fills the derived lambda/rho.
BuildResult build_hetree(std::shared_ptr<const Dataset> sorted, const TreeParams& params);

TreeParams derive_params(const Dataset& data, Variant variant, std::size_t leaves,
                         std::size_t degree);

// Equal-count leaves over `items` (sorted positions): the first
// k = leaves - (lambda * leaves - |items|) hold lambda objects, the rest lambda - 1.
std::vector<NodeId> construct_leaves_c(HETree& tree, std::span<const ObjectRef> items,
                                       std::size_t leaves, BuildCounters& counters);
// Equal-width leaves over `grid`; empty leaves are kept with empty stats.
std::vector<NodeId> construct_leaves_r(HETree& tree, std::span<const ObjectRef> items,
                                       const RangeGrid& grid, BuildCounters& counters);

// Start offsets of the equal-count slices: offsets[i] .. offsets[i+1].
std::vector<std::size_t> c_leaf_offsets(std::size_t count, std::size_t leaves);

// Optional override for the stats of the first level built above the input.
using LevelStatsFn = std::function<NodeStats(std::size_t index,
                                             const std::vector<NodeId>& children)>;

// One level of parents over `level`, d consecutive nodes per parent.
std::vector<NodeId> build_parent_level(HETree& tree, const std::vector<NodeId>& level,
                                       std::size_t degree, BuildCounters& counters,
                                       const LevelStatsFn& stats_fn = {});

// Groups levels bottom-up until a single parent remains and returns it. A
// single input node still receives a parent.
NodeId constr_internal_nodes(HETree& tree, std::vector<NodeId> level,
                             std::size_t degree, BuildCounters& counters,
                             const LevelStatsFn& first_level_stats = {});

NodeStats compute_leaf_stats(const HETree& tree, NodeId leaf);
NodeStats stats_of_items(const HETree& tree, std::span<const ObjectRef> items);

Interval hull(const HETree& tree, const std::vector<NodeId>& nodes);

}  // namespace hetree

#endif  // HETREE_BUILD_H_
