#ifndef HETREE_TREE_H_
#define HETREE_TREE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "hetree/dataset.h"
#include "hetree/stats.h"

namespace hetree {

using NodeId = std::uint32_t;

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool upper_closed = true;

  double length() const { return upper - lower; }
  bool contains(double v) const {
    return v >= lower && (upper_closed ? v <= upper : v < upper);
  }
  // Closed query range [lo, hi] inside this interval.
  bool contains(double lo, double hi) const { return lo >= lower && contains(hi); }
};

enum class Variant { kC, kR };
enum class BuildMode { kFull, kIncremental };

const char* variant_name(Variant v);

struct TreeParams {
  Variant variant = Variant::kC;
  std::size_t leaves = 1;
  std::size_t degree = 2;
  std::size_t lambda = 0;  // C: ceil(|D| / leaves)
  double rho = 0.0;        // R: (maxv - minv) / leaves
};

struct Node {
  NodeId id = 0;
  Interval interval;
  int height = 0;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  std::vector<ObjectRef> items;  // leaves only, sorted by (value, subject)
  NodeStats stats;

  bool is_leaf() const { return height == 0; }
};

struct BuildCounters {
  std::uint64_t nodes_built = 0;
  std::uint64_t leaves_built = 0;
  std::uint64_t stats_from_scratch = 0;  // computed by scanning raw values
  std::uint64_t stats_aggregated = 0;    // merged from existing summaries
  std::uint64_t objects_scanned = 0;

  BuildCounters& operator+=(const BuildCounters& o);
};

BuildCounters operator-(const BuildCounters& a, const BuildCounters& b);

// Shape of the canonical tree over `leaves` leaves with fan-out `degree`:
// node q at height h covers leaves [q*d^h, (q+1)*d^h).
class TreeShape {
 public:
  TreeShape(std::size_t leaves, std::size_t degree);

  std::size_t leaves() const { return leaves_; }
  std::size_t degree() const { return degree_; }
  int height() const { return height_; }
  std::size_t span(int h) const { return spans_[h]; }
  std::size_t count_at(int h) const;
  std::size_t leaf_begin(int h, std::size_t q) const;
  std::size_t leaf_end(int h, std::size_t q) const;
  // Index range [first, last) of the sibling group containing (h, q).
  std::pair<std::size_t, std::size_t> siblings(int h, std::size_t q) const;
  std::pair<std::size_t, std::size_t> children(int h, std::size_t q) const;

 private:
  std::size_t leaves_;
  std::size_t degree_;
  int height_;
  std::vector<std::size_t> spans_;
};

// Equal-width leaf boundaries over a domain. Boundaries are computed as
// lo + i * rho so that every construction path sees identical bounds.
class RangeGrid {
 public:
  RangeGrid(double lo, double hi, std::size_t leaves, bool upper_closed = true);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double rho() const { return rho_; }
  std::size_t leaves() const { return leaves_; }
  double boundary(std::size_t i) const;
  // Leaves [first, last) as one interval.
  Interval span(std::size_t first, std::size_t last) const;
  // Placement j = floor((v - lo) / rho), clamped, then settled against the
  // boundaries so that membership always agrees with the intervals.
  std::size_t leaf_of(double v) const;

 private:
  double lo_, hi_, rho_;
  std::size_t leaves_;
  bool upper_closed_;
};

class HETree {
 public:
  HETree() = default;
  HETree(std::shared_ptr<const Dataset> dataset, TreeParams params, BuildMode mode);

  const Dataset& dataset() const { return *dataset_; }
  std::shared_ptr<const Dataset> dataset_ptr() const { return dataset_; }
  const TreeParams& params() const { return params_; }
  void set_params(const TreeParams& p) { params_ = p; }
  BuildMode mode() const { return mode_; }

  NodeId add_node(Node node);
  void remove_node(NodeId id);
  bool alive(NodeId id) const { return id < nodes_.size() && alive_[id]; }
  const Node& node(NodeId id) const { return nodes_[id]; }
  Node& mutable_node(NodeId id) { return nodes_[id]; }
  std::size_t node_count() const { return live_; }
  std::size_t ids_issued() const { return nodes_.size(); }

  std::optional<NodeId> root() const { return root_; }
  void set_root(std::optional<NodeId> id) { root_ = id; }
  bool is_root(NodeId id) const { return root_ && *root_ == id; }
  int height() const;

  // Alive nodes grouped by height, each level ordered left to right.
  std::vector<std::vector<NodeId>> levels() const;
  // Leaves under `id`, left to right.
  std::vector<NodeId> leaves_under(NodeId id) const;
  // All alive nodes of the subtree rooted at `id`, preorder.
  std::vector<NodeId> subtree(NodeId id) const;

  // Makes `children` the ordered children of `parent`.
  void link(NodeId parent, const std::vector<NodeId>& children);

  // The sibling group of `id`: its parent's children, the root alone, or a
  // group registered while the parent is not yet materialized.
  std::vector<NodeId> sibling_group(NodeId id) const;
  void register_group(const std::vector<NodeId>& group);

  double value(ObjectRef r) const { return dataset_->value(r); }
  const DataObject& object(ObjectRef r) const { return (*dataset_)[r]; }

  // Degree of the subtree containing `id`, honoring subtree adaptations.
  std::size_t degree_at(NodeId id) const;
  void set_subtree_degree(NodeId id, std::size_t degree) { degree_of_[id] = degree; }
  void clear_subtree_degree(NodeId id) { degree_of_.erase(id); }
  bool has_subtree_overrides_below(NodeId id) const;

 private:
  std::shared_ptr<const Dataset> dataset_;
  TreeParams params_;
  BuildMode mode_ = BuildMode::kFull;
  std::vector<Node> nodes_;
  std::vector<bool> alive_;
  std::size_t live_ = 0;
  std::optional<NodeId> root_;
  std::map<NodeId, std::size_t> group_of_;
  std::vector<std::vector<NodeId>> groups_;
  std::map<NodeId, std::size_t> degree_of_;
};

}  // namespace hetree

#endif  // HETREE_TREE_H_
