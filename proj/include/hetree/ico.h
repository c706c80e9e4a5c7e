#ifndef HETREE_ICO_H_
#define HETREE_ICO_H_

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "hetree/scenario.h"
#include "hetree/tree.h"

namespace hetree {

// Consecutive intervals of length `len` starting at `low`, cut at `up`; at
// most n of them. Only the last may be shorter, and only it carries
// `upper_closed`.
std::vector<Interval> compute_sibling_intervals(double low, double up, double len,
                                                std::size_t n, bool upper_closed = true);

// Interval spanned by the sibling group of a parent `par` whose nominal
// length is parent_len: the group starts at the multiple of d * parent_len
// at or below par and is clipped to maxv.
Interval parent_group_interval(const Interval& par, double minv, double maxv,
                               double parent_len, std::size_t degree);

struct SiblingNode {
  std::size_t slot = 0;
  NodeId id = 0;
  std::vector<ObjectRef> enclosed;  // internal nodes only
};

// Distributes `available` over `intervals` (slot by the floor formula),
// removing what it places. Only non-empty slots become nodes; leaves get
// their objects sorted. `skip_slot` is left untouched. Nodes are linked
// under `parent` when given.
std::vector<SiblingNode> constr_sibling_nodes(HETree& tree,
                                              const std::vector<Interval>& intervals,
                                              std::optional<NodeId> parent,
                                              std::vector<ObjectRef>& available,
                                              int height, BuildCounters& counters,
                                              std::optional<std::size_t> skip_slot = {});

// Position of a node in the canonical layout: index among nodes of its height.
struct GridPos {
  int height = 0;
  std::size_t index = 0;

  auto operator<=>(const GridPos&) const = default;
};

// Incremental construction state. Every rendering is followed by step(),
// which materializes whatever one more drill-down or roll-up could show.
class IcoState {
 public:
  IcoState(std::shared_ptr<const Dataset> data, Variant variant, std::size_t leaves,
           std::size_t degree);

  // Builds the initial nodes and returns the first rendering.
  RenderedSet init(const StartingPoint& start);
  // Materializes the elements reachable from `cur` in one operation and
  // returns what this call built.
  BuildCounters step(const RenderedSet& cur);

  const HETree& tree() const { return tree_; }
  const BuildCounters& counters() const { return counters_; }
  const TreeShape& shape() const { return shape_; }
  double leaf_len() const { return leaf_len_; }
  std::optional<GridPos> position(NodeId id) const;
  std::optional<NodeId> node_at(GridPos p) const;
  // Bounds of any canonical position, built or not.
  Interval interval_of(GridPos p) const;
  // Bounds and height of the first constructed group.
  const Interval& initial_interval() const { return i0_; }
  int initial_height() const { return h0_; }

 private:
  bool is_c() const { return tree_.params().variant == Variant::kC; }
  double value_at(std::size_t pos) const { return data_->value(pos); }
  NodeId record(NodeId id, GridPos p);
  NodeId build_c(GridPos p);
  std::vector<NodeId> build_group(int height, std::size_t first, std::size_t last,
                                  std::optional<NodeId> parent,
                                  std::vector<ObjectRef>* pool,
                                  std::optional<std::size_t> skip = {});
  void build_upward(const std::vector<NodeId>& group);
  void build_children(NodeId id);
  GridPos covering_position(const Interval& u) const;
  std::size_t leaf_of_resource(const StartingPoint& start) const;

  std::shared_ptr<const Dataset> data_;
  HETree tree_;
  TreeShape shape_;
  std::optional<RangeGrid> grid_;      // R
  std::vector<std::size_t> offsets_;  // C leaf offsets into the sorted data
  double leaf_len_ = 0.0;
  BuildCounters counters_;
  std::vector<GridPos> pos_of_;
  std::map<GridPos, NodeId> by_pos_;
  std::set<GridPos> empty_;
  std::vector<ObjectRef> pool_;
  std::unordered_map<NodeId, std::vector<ObjectRef>> pending_;
  Interval i0_;
  int h0_ = 0;
};

}  // namespace hetree

#endif  // HETREE_ICO_H_
