#include "hetree/ico.h"

#include <algorithm>
#include <cmath>

#include "hetree/build.h"
#include "hetree/error.h"

namespace hetree {

std::vector<Interval> compute_sibling_intervals(double low, double up, double len,
                                                std::size_t n, bool upper_closed) {
  std::vector<Interval> out;
  double lo = low;
  for (std::size_t i = 0; i < n; ++i) {
    double hi = std::min(up, lo + len);
    bool reached = hi >= up;
    out.push_back({lo, hi, reached && upper_closed});
    if (reached) break;
    lo = hi;
  }
  return out;
}

Interval parent_group_interval(const Interval& par, double minv, double maxv,
                               double parent_len, std::size_t degree) {
  double width = static_cast<double>(degree) * parent_len;
  double lower = minv + width * std::floor((par.lower - minv) / width);
  double upper = std::min(maxv, lower + width);
  return {lower, upper, upper >= maxv};
}

std::vector<SiblingNode> constr_sibling_nodes(HETree& tree,
                                              const std::vector<Interval>& intervals,
                                              std::optional<NodeId> parent,
                                              std::vector<ObjectRef>& available,
                                              int height, BuildCounters& counters,
                                              std::optional<std::size_t> skip_slot) {
  std::vector<SiblingNode> out;
  if (intervals.empty() || available.empty()) return out;
  const std::size_t n = intervals.size();
  const double base = intervals.front().lower;
  const double len = intervals.front().length();
  std::vector<std::vector<ObjectRef>> slots(n);
  std::vector<ObjectRef> keep;
  for (ObjectRef r : available) {
    double v = tree.value(r);
    double raw = len > 0 ? std::floor((v - base) / len) : 0.0;
    std::size_t j = raw <= 0 ? 0
                    : raw >= static_cast<double>(n - 1) ? n - 1
                                                        : static_cast<std::size_t>(raw);
    while (j > 0 && v < intervals[j].lower) --j;
    while (j + 1 < n && v >= intervals[j + 1].lower) ++j;
    if (!intervals[j].contains(v) || (skip_slot && *skip_slot == j)) {
      keep.push_back(r);
      continue;
    }
    slots[j].push_back(r);
  }
  available.swap(keep);
  std::vector<NodeId> ids;
  for (std::size_t j = 0; j < n; ++j) {
    if (slots[j].empty()) continue;
    Node node;
    node.interval = intervals[j];
    node.height = height;
    node.stats = stats_of_items(tree, slots[j]);
    ++counters.nodes_built;
    ++counters.stats_from_scratch;
    counters.objects_scanned += slots[j].size();
    SiblingNode sn;
    sn.slot = j;
    if (height == 0) {
      std::sort(slots[j].begin(), slots[j].end(), [&](ObjectRef a, ObjectRef b) {
        const DataObject& x = tree.object(a);
        const DataObject& y = tree.object(b);
        if (object_less(x, y)) return true;
        if (object_less(y, x)) return false;
        return a < b;
      });
      node.items = std::move(slots[j]);
      ++counters.leaves_built;
    } else {
      sn.enclosed = std::move(slots[j]);
    }
    sn.id = tree.add_node(std::move(node));
    ids.push_back(sn.id);
    out.push_back(std::move(sn));
  }
  if (parent) tree.link(*parent, ids);
  return out;
}

IcoState::IcoState(std::shared_ptr<const Dataset> data, Variant variant,
                   std::size_t leaves, std::size_t degree)
    : data_(variant == Variant::kC && data && !data->sorted()
                ? std::make_shared<const Dataset>(sort_dataset(*data))
                : data),
      tree_(data_, derive_params(*data_, variant, leaves, degree), BuildMode::kIncremental),
      shape_(leaves, degree) {
  leaf_len_ = (data_->maxv() - data_->minv()) / static_cast<double>(leaves);
  if (variant == Variant::kC) {
    offsets_ = c_leaf_offsets(data_->size(), leaves);
  } else {
    grid_.emplace(data_->minv(), data_->maxv(), leaves);
    pool_.resize(data_->size());
    for (std::size_t i = 0; i < pool_.size(); ++i) pool_[i] = static_cast<ObjectRef>(i);
  }
}

std::optional<GridPos> IcoState::position(NodeId id) const {
  if (id >= pos_of_.size() || !tree_.alive(id)) return std::nullopt;
  return pos_of_[id];
}

std::optional<NodeId> IcoState::node_at(GridPos p) const {
  auto it = by_pos_.find(p);
  if (it == by_pos_.end()) return std::nullopt;
  return it->second;
}

Interval IcoState::interval_of(GridPos p) const {
  std::size_t lb = shape_.leaf_begin(p.height, p.index);
  std::size_t le = shape_.leaf_end(p.height, p.index);
  if (grid_) return grid_->span(lb, le);
  return {value_at(offsets_[lb]), value_at(offsets_[le] - 1), true};
}

NodeId IcoState::record(NodeId id, GridPos p) {
  if (pos_of_.size() <= id) pos_of_.resize(id + 1);
  pos_of_[id] = p;
  by_pos_[p] = id;
  return id;
}

NodeId IcoState::build_c(GridPos p) {
  std::size_t ob = offsets_[shape_.leaf_begin(p.height, p.index)];
  std::size_t oe = offsets_[shape_.leaf_end(p.height, p.index)];
  Node node;
  node.height = p.height;
  node.interval = interval_of(p);
  std::vector<NodeId> children;
  if (p.height > 0) {
    auto [cf, cl] = shape_.children(p.height, p.index);
    for (std::size_t q = cf; q < cl; ++q) {
      auto c = node_at({p.height - 1, q});
      if (!c) {
        children.clear();
        break;
      }
      children.push_back(*c);
    }
  }
  if (!children.empty()) {
    std::vector<NodeStats> parts;
    for (NodeId c : children) parts.push_back(tree_.node(c).stats);
    node.stats = merge_stats(parts);
    ++counters_.stats_aggregated;
  } else {
    StatsAccumulator acc;
    for (std::size_t i = ob; i < oe; ++i) acc.add(value_at(i));
    node.stats = acc.result();
    ++counters_.stats_from_scratch;
    counters_.objects_scanned += oe - ob;
  }
  if (p.height == 0) {
    node.items.resize(oe - ob);
    for (std::size_t i = ob; i < oe; ++i) node.items[i - ob] = static_cast<ObjectRef>(i);
    ++counters_.leaves_built;
  }
  ++counters_.nodes_built;
  NodeId id = record(tree_.add_node(std::move(node)), p);
  if (!children.empty()) tree_.link(id, children);
  return id;
}

std::vector<NodeId> IcoState::build_group(int height, std::size_t first, std::size_t last,
                                          std::optional<NodeId> parent,
                                          std::vector<ObjectRef>* pool,
                                          std::optional<std::size_t> skip) {
  if (is_c()) {
    for (std::size_t q = first; q < last; ++q) {
      if (!node_at({height, q})) build_c({height, q});
    }
  } else {
    std::vector<Interval> intervals;
    for (std::size_t q = first; q < last; ++q) intervals.push_back(interval_of({height, q}));
    std::optional<std::size_t> skip_slot;
    if (skip) skip_slot = *skip - first;
    auto built = constr_sibling_nodes(tree_, intervals, std::nullopt, *pool, height,
                                      counters_, skip_slot);
    std::vector<bool> filled(last - first, false);
    for (auto& sn : built) {
      record(sn.id, {height, first + sn.slot});
      filled[sn.slot] = true;
      if (height > 0) pending_[sn.id] = std::move(sn.enclosed);
    }
    for (std::size_t j = 0; j < filled.size(); ++j) {
      if (!filled[j] && !(skip_slot && *skip_slot == j)) empty_.insert({height, first + j});
    }
  }
  std::vector<NodeId> group;
  for (std::size_t q = first; q < last; ++q) {
    if (auto id = node_at({height, q})) group.push_back(*id);
  }
  if (group.empty()) return group;
  if (parent) {
    tree_.link(*parent, group);
  } else if (height >= shape_.height()) {
    tree_.set_root(group.front());
  } else {
    tree_.register_group(group);
  }
  return group;
}

void IcoState::build_upward(const std::vector<NodeId>& group) {
  GridPos p = pos_of_[group.front()];
  GridPos pp{p.height + 1, p.index / shape_.degree()};
  Node node;
  node.height = pp.height;
  node.interval = interval_of(pp);
  std::vector<NodeStats> parts;
  for (NodeId c : group) parts.push_back(tree_.node(c).stats);
  node.stats = merge_stats(parts);
  ++counters_.stats_aggregated;
  ++counters_.nodes_built;
  NodeId id = record(tree_.add_node(std::move(node)), pp);
  tree_.link(id, group);
  if (pp.height >= shape_.height()) {
    tree_.set_root(id);
    return;
  }
  auto [first, last] = shape_.siblings(pp.height, pp.index);
  build_group(pp.height, first, last, std::nullopt, &pool_, pp.index);
}

void IcoState::build_children(NodeId id) {
  GridPos p = pos_of_[id];
  auto [first, last] = shape_.children(p.height, p.index);
  if (is_c()) {
    build_group(p.height - 1, first, last, id, nullptr);
    return;
  }
  std::vector<ObjectRef> pool = std::move(pending_[id]);
  pending_.erase(id);
  build_group(p.height - 1, first, last, id, &pool);
}

BuildCounters IcoState::step(const RenderedSet& cur) {
  BuildCounters before = counters_;
  if (cur.kind == RenderedSet::Kind::kNodes && !cur.nodes.empty()) {
    NodeId first = cur.nodes.front();
    GridPos p = pos_of_[first];
    if (p.height < shape_.height() && !tree_.node(first).parent) build_upward(cur.nodes);
    if (p.height > 0) {
      for (NodeId g : cur.nodes) {
        if (tree_.node(g).children.empty()) build_children(g);
      }
    }
  }
  return counters_ - before;
}

GridPos IcoState::covering_position(const Interval& u) const {
  const int top = shape_.height();
  if (grid_) {
    std::size_t a = grid_->leaf_of(u.lower);
    std::size_t b = grid_->leaf_of(u.upper);
    for (int h = 1; h <= top; ++h) {
      if (a / shape_.span(h) == b / shape_.span(h)) return {h, a / shape_.span(h)};
    }
    return {top, 0};
  }
  for (int h = 1; h <= top; ++h) {
    std::size_t lo = 0, hi = shape_.count_at(h);
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (value_at(offsets_[shape_.leaf_end(h, mid)] - 1) >= u.upper) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    if (lo < shape_.count_at(h) &&
        value_at(offsets_[shape_.leaf_begin(h, lo)]) <= u.lower) {
      return {h, lo};
    }
  }
  return {top, 0};
}

std::size_t IcoState::leaf_of_resource(const StartingPoint& start) const {
  double v = start.u.lower;
  if (grid_) return grid_->leaf_of(v);
  // First position not ordered before (v, resource).
  std::size_t lo = 0, hi = data_->size();
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    double mv = data_->value(mid);
    if (mv < v || (mv == v && (*data_)[mid].subject < *start.resource)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  std::size_t pos = lo;
  auto leaf = std::upper_bound(offsets_.begin(), offsets_.end(), pos) - offsets_.begin() - 1;
  return static_cast<std::size_t>(leaf);
}

RenderedSet IcoState::init(const StartingPoint& start) {
  RenderedSet cur;
  switch (start.scenario) {
    case Scenario::kBSC: {
      int top = shape_.height();
      auto group = build_group(top, 0, 1, std::nullopt, &pool_);
      cur.nodes = group;
      h0_ = top;
      i0_ = interval_of({top, 0});
      break;
    }
    case Scenario::kRES: {
      std::size_t leaf = leaf_of_resource(start);
      auto [first, last] = shape_.siblings(0, leaf);
      auto group = build_group(0, first, last, std::nullopt, &pool_);
      cur.kind = RenderedSet::Kind::kObjects;
      cur.focus_leaf = node_at({0, leaf});
      if (!cur.focus_leaf) throw Error(ErrorCode::kInvariant, "leaf of interest not built");
      cur.nodes = {*cur.focus_leaf};
      h0_ = 0;
      i0_ = hull(tree_, group);
      break;
    }
    case Scenario::kRAN: {
      GridPos x = covering_position(start.u);
      auto [first, last] = shape_.children(x.height, x.index);
      auto group = build_group(x.height - 1, first, last, std::nullopt, &pool_);
      if (group.empty()) {
        throw Error(ErrorCode::kEmptyRange, "no objects under the node covering the range");
      }
      cur.nodes = group;
      h0_ = x.height - 1;
      i0_ = hull(tree_, group);
      break;
    }
  }
  step(cur);
  return cur;
}

}  // namespace hetree
