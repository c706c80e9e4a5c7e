#ifndef HETREE_ADA_H_
#define HETREE_ADA_H_

#include <optional>
#include <string>
#include <vector>

#include "hetree/tree.h"

namespace hetree {

enum class AdaptKind {
  kDegreePow,
  kDegreeMult,
  kDegreeRoot,
  kDegreeOther,
  kLeavesIncrease,
  kLeavesDivPow,
  kLeavesDiv,
  kLeavesMinus,
};

const char* adapt_kind_name(AdaptKind kind);

struct AdaptationCase {
  AdaptKind kind = AdaptKind::kDegreeOther;
  std::size_t k = 0;  // exponent, factor or difference, depending on kind

  bool operator==(const AdaptationCase&) const = default;
};

// Exactly one of d, l may change. Throws kUnsupported when both change and
// kNoOp when neither does.
AdaptationCase classify(std::size_t d, std::size_t l, std::size_t d2, std::size_t l2);

// Subscript 0: built or computed from scratch. Subscript +: derived from
// elements of the old tree. Nodes reused as they are count in neither.
struct AdaptationReport {
  AdaptationCase requested;
  AdaptationCase executed;  // differs when the requested shortcut is not exact
  std::size_t leaves_new = 0;
  std::size_t leaves_derived = 0;
  std::size_t internals_new = 0;
  std::size_t internals_derived = 0;
  std::size_t stats_leaves_new = 0;
  std::size_t stats_leaves_derived = 0;
  std::size_t stats_internals_new = 0;
  std::size_t stats_internals_derived = 0;
  std::size_t nodes_removed = 0;
  // m = |D|, e = (d'l' - 1)/(d' - 1), r = (d'^k l' - 1)/(d'^k - 1)
  double m = 0.0;
  double e = 0.0;
  double r = 0.0;
  BuildCounters counters;
  NodeId new_root = 0;
};

// Adapts `tree` in place. Without `root` the whole tree is adapted; with it
// only the subtree under that node, whose leaf count and degree take the
// place of l and d. Only full-mode trees are accepted.
AdaptationReport adapt(HETree& tree, std::optional<NodeId> root,
                       std::optional<std::size_t> degree, std::optional<std::size_t> leaves);

// Merges every m consecutive leaves (the last takes the remainder) into new
// leaves with concatenated objects, hull intervals and merged stats.
std::vector<NodeId> merge_leaves(HETree& tree, const std::vector<NodeId>& leaves,
                                 std::size_t m);

// n2 takes n1's slot under n1's parent, or becomes the root.
void replace_node(HETree& tree, NodeId n1, NodeId n2);

// parents[i] adopts children[i*d .. i*d+d).
void create_edges(HETree& tree, const std::vector<NodeId>& parents,
                  const std::vector<NodeId>& children, std::size_t d);

}  // namespace hetree

#endif  // HETREE_ADA_H_
