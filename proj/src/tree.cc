#include "hetree/tree.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "hetree/error.h"

namespace hetree {

const char* variant_name(Variant v) { return v == Variant::kC ? "C" : "R"; }

BuildCounters& BuildCounters::operator+=(const BuildCounters& o) {
  nodes_built += o.nodes_built;
  leaves_built += o.leaves_built;
  stats_from_scratch += o.stats_from_scratch;
  stats_aggregated += o.stats_aggregated;
  objects_scanned += o.objects_scanned;
  return *this;
}

BuildCounters operator-(const BuildCounters& a, const BuildCounters& b) {
  return {a.nodes_built - b.nodes_built, a.leaves_built - b.leaves_built,
          a.stats_from_scratch - b.stats_from_scratch,
          a.stats_aggregated - b.stats_aggregated,
          a.objects_scanned - b.objects_scanned};
}

TreeShape::TreeShape(std::size_t leaves, std::size_t degree)
    : leaves_(leaves), degree_(degree), height_(1) {
  if (leaves == 0 || degree < 2) {
    throw Error(ErrorCode::kParameter, "tree shape needs leaves >= 1 and degree >= 2");
  }
  spans_.push_back(1);
  constexpr std::size_t kCap = std::numeric_limits<std::size_t>::max() / 64;
  auto next = [&] { return std::min(spans_.back() * degree, kCap); };
  spans_.push_back(next());
  while (spans_.back() < leaves) {
    spans_.push_back(next());
    ++height_;
  }
}

std::size_t TreeShape::count_at(int h) const {
  return (leaves_ + spans_[h] - 1) / spans_[h];
}

std::size_t TreeShape::leaf_begin(int h, std::size_t q) const { return q * spans_[h]; }

std::size_t TreeShape::leaf_end(int h, std::size_t q) const {
  return std::min(leaves_, (q + 1) * spans_[h]);
}

std::pair<std::size_t, std::size_t> TreeShape::siblings(int h, std::size_t q) const {
  if (h >= height_) return {0, 1};
  std::size_t first = q / degree_ * degree_;
  return {first, std::min(first + degree_, count_at(h))};
}

std::pair<std::size_t, std::size_t> TreeShape::children(int h, std::size_t q) const {
  std::size_t first = q * degree_;
  return {first, std::min(first + degree_, count_at(h - 1))};
}

RangeGrid::RangeGrid(double lo, double hi, std::size_t leaves, bool upper_closed)
    : lo_(lo), hi_(hi), rho_((hi - lo) / static_cast<double>(leaves)),
      leaves_(leaves), upper_closed_(upper_closed) {}

double RangeGrid::boundary(std::size_t i) const {
  if (i == 0) return lo_;
  if (i >= leaves_) return hi_;
  return lo_ + static_cast<double>(i) * rho_;
}

Interval RangeGrid::span(std::size_t first, std::size_t last) const {
  return {boundary(first), boundary(last), last >= leaves_ ? upper_closed_ : false};
}

std::size_t RangeGrid::leaf_of(double v) const {
  if (!(rho_ > 0)) return 0;
  double raw = std::floor((v - lo_) / rho_);
  std::size_t j = raw <= 0 ? 0
                  : raw >= static_cast<double>(leaves_ - 1)
                      ? leaves_ - 1
                      : static_cast<std::size_t>(raw);
  while (j > 0 && v < boundary(j)) --j;
  while (j + 1 < leaves_ && v >= boundary(j + 1)) ++j;
  return j;
}

HETree::HETree(std::shared_ptr<const Dataset> dataset, TreeParams params, BuildMode mode)
    : dataset_(std::move(dataset)), params_(params), mode_(mode) {}

NodeId HETree::add_node(Node node) {
  NodeId id = static_cast<NodeId>(nodes_.size());
  node.id = id;
  nodes_.push_back(std::move(node));
  alive_.push_back(true);
  ++live_;
  return id;
}

void HETree::remove_node(NodeId id) {
  if (!alive(id)) return;
  alive_[id] = false;
  --live_;
  Node& n = nodes_[id];
  std::vector<ObjectRef>().swap(n.items);
  std::vector<NodeId>().swap(n.children);
  group_of_.erase(id);
  degree_of_.erase(id);
  if (root_ && *root_ == id) root_.reset();
}

int HETree::height() const { return root_ ? nodes_[*root_].height : 0; }

std::vector<NodeId> HETree::subtree(NodeId id) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    out.push_back(n);
    const auto& ch = nodes_[n].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::vector<std::vector<NodeId>> HETree::levels() const {
  std::vector<std::vector<NodeId>> out;
  auto put = [&](NodeId n) {
    std::size_t h = static_cast<std::size_t>(nodes_[n].height);
    if (out.size() <= h) out.resize(h + 1);
    out[h].push_back(n);
  };
  if (mode_ == BuildMode::kFull && root_) {
    for (NodeId n : subtree(*root_)) put(n);
    return out;
  }
  std::vector<NodeId> all;
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (alive_[i]) all.push_back(i);
  }
  std::sort(all.begin(), all.end(), [&](NodeId a, NodeId b) {
    const Interval& x = nodes_[a].interval;
    const Interval& y = nodes_[b].interval;
    return std::tie(x.lower, x.upper, a) < std::tie(y.lower, y.upper, b);
  });
  for (NodeId n : all) put(n);
  return out;
}

std::vector<NodeId> HETree::leaves_under(NodeId id) const {
  std::vector<NodeId> out;
  for (NodeId n : subtree(id)) {
    if (nodes_[n].is_leaf()) out.push_back(n);
  }
  return out;
}

void HETree::link(NodeId parent, const std::vector<NodeId>& children) {
  nodes_[parent].children = children;
  for (NodeId c : children) {
    nodes_[c].parent = parent;
    group_of_.erase(c);
  }
}

std::vector<NodeId> HETree::sibling_group(NodeId id) const {
  const Node& n = nodes_[id];
  if (n.parent) return nodes_[*n.parent].children;
  auto it = group_of_.find(id);
  if (it != group_of_.end()) return groups_[it->second];
  return {id};
}

void HETree::register_group(const std::vector<NodeId>& group) {
  groups_.push_back(group);
  for (NodeId n : group) group_of_[n] = groups_.size() - 1;
}

std::size_t HETree::degree_at(NodeId id) const {
  std::optional<NodeId> cur = id;
  while (cur) {
    auto it = degree_of_.find(*cur);
    if (it != degree_of_.end()) return it->second;
    cur = nodes_[*cur].parent;
  }
  return params_.degree;
}

bool HETree::has_subtree_overrides_below(NodeId id) const {
  for (const auto& [k, d] : degree_of_) {
    if (k == id || !alive(k)) continue;
    std::optional<NodeId> cur = nodes_[k].parent;
    while (cur) {
      if (*cur == id) return true;
      cur = nodes_[*cur].parent;
    }
  }
  return false;
}

}  // namespace hetree
