#include "hetree/ada.h"

#include <algorithm>

#include "hetree/build.h"
#include "hetree/error.h"

namespace hetree {

const char* adapt_kind_name(AdaptKind kind) {
  switch (kind) {
    case AdaptKind::kDegreePow: return "degree_pow";
    case AdaptKind::kDegreeMult: return "degree_mult";
    case AdaptKind::kDegreeRoot: return "degree_root";
    case AdaptKind::kDegreeOther: return "degree_other";
    case AdaptKind::kLeavesIncrease: return "leaves_increase";
    case AdaptKind::kLeavesDivPow: return "leaves_div_pow";
    case AdaptKind::kLeavesDiv: return "leaves_div";
    case AdaptKind::kLeavesMinus: return "leaves_minus";
  }
  return "?";
}

namespace {

// k > 1 with base^k == value, if any.
std::optional<std::size_t> int_log(std::size_t base, std::size_t value) {
  std::size_t k = 0;
  std::size_t p = 1;
  while (p < value) {
    if (p > value / base) return std::nullopt;
    p *= base;
    ++k;
  }
  if (p == value) return k;
  return std::nullopt;
}

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t p = 1;
  while (e--) p *= b;
  return p;
}

}  // namespace

AdaptationCase classify(std::size_t d, std::size_t l, std::size_t d2, std::size_t l2) {
  bool dc = d != d2;
  bool lc = l != l2;
  if (dc && lc) {
    throw Error(ErrorCode::kUnsupported, "change the degree and the leaves in two steps");
  }
  if (!dc && !lc) throw Error(ErrorCode::kNoOp, "parameters are unchanged");
  if (dc) {
    if (d2 > d) {
      if (auto k = int_log(d, d2); k && *k > 1) return {AdaptKind::kDegreePow, *k};
      if (d2 % d == 0) return {AdaptKind::kDegreeMult, d2 / d};
      return {AdaptKind::kDegreeOther, 0};
    }
    if (auto k = int_log(d2, d); k && *k > 1) return {AdaptKind::kDegreeRoot, *k};
    return {AdaptKind::kDegreeOther, 0};
  }
  if (l2 > l) return {AdaptKind::kLeavesIncrease, l2 - l};
  if (l % l2 == 0) {
    std::size_t m = l / l2;
    if (auto k = int_log(d, m); k && *k >= 1) return {AdaptKind::kLeavesDivPow, *k};
    return {AdaptKind::kLeavesDiv, m};
  }
  return {AdaptKind::kLeavesMinus, l - l2};
}

std::vector<NodeId> merge_leaves(HETree& tree, const std::vector<NodeId>& leaves,
                                 std::size_t m) {
  if (m == 0) throw Error(ErrorCode::kParameter, "merge factor must be positive");
  std::vector<NodeId> out;
  std::vector<NodeStats> parts;
  for (std::size_t i = 0; i < leaves.size(); i += m) {
    std::vector<NodeId> group(leaves.begin() + i,
                              leaves.begin() + std::min(leaves.size(), i + m));
    Node n;
    n.interval = hull(tree, group);
    parts.clear();
    for (NodeId g : group) {
      const Node& old = tree.node(g);
      n.items.insert(n.items.end(), old.items.begin(), old.items.end());
      parts.push_back(old.stats);
    }
    n.stats = merge_stats(parts);
    out.push_back(tree.add_node(std::move(n)));
  }
  return out;
}

void replace_node(HETree& tree, NodeId n1, NodeId n2) {
  auto parent = tree.node(n1).parent;
  if (parent) {
    auto& ch = tree.mutable_node(*parent).children;
    std::replace(ch.begin(), ch.end(), n1, n2);
    tree.mutable_node(n2).parent = parent;
    tree.mutable_node(n1).parent.reset();
  } else {
    tree.mutable_node(n2).parent.reset();
    if (tree.is_root(n1)) tree.set_root(n2);
  }
}

void create_edges(HETree& tree, const std::vector<NodeId>& parents,
                  const std::vector<NodeId>& children, std::size_t d) {
  if (children.size() > parents.size() * d) {
    throw Error(ErrorCode::kInvariant, "too many children for the given parents");
  }
  for (std::size_t i = 0; i < parents.size(); ++i) {
    std::size_t b = std::min(children.size(), i * d);
    std::size_t e = std::min(children.size(), b + d);
    tree.link(parents[i], std::vector<NodeId>(children.begin() + b, children.begin() + e));
  }
}

namespace {

// Levels of the subtree under r, leaves first, when it has exactly the shape
// a fresh build of its leaves with degree d would give.
std::optional<std::vector<std::vector<NodeId>>> canonical_levels(const HETree& tree,
                                                                 NodeId r, std::size_t d) {
  if (tree.has_subtree_overrides_below(r)) return std::nullopt;
  std::vector<std::vector<NodeId>> lv{tree.leaves_under(r)};
  std::size_t l = lv[0].size();
  while (!(lv.size() > 1 && lv.back().size() == 1 && lv.back()[0] == r)) {
    const auto& cur = lv.back();
    std::vector<NodeId> next;
    for (std::size_t i = 0; i < cur.size(); i += d) {
      std::vector<NodeId> chunk(cur.begin() + i, cur.begin() + std::min(cur.size(), i + d));
      auto p = tree.node(chunk[0]).parent;
      if (!p || tree.node(*p).children != chunk ||
          tree.node(*p).height != static_cast<int>(lv.size())) {
        return std::nullopt;
      }
      next.push_back(*p);
    }
    if (next.size() == 1 && next[0] != r && tree.node(next[0]).children.size() == 1) {
      return std::nullopt;
    }
    lv.push_back(std::move(next));
    if (lv.size() > 64) return std::nullopt;
  }
  if (static_cast<int>(lv.size()) - 1 != TreeShape(l, d).height()) return std::nullopt;
  return lv;
}

struct Ctx {
  HETree& tree;
  NodeId r;
  bool whole;
  std::vector<NodeId> leaves;
  std::vector<ObjectRef> items;
  std::vector<std::size_t> old_offsets;  // leaf i holds items[old_offsets[i] .. [i+1])
  std::size_t d;
  std::size_t l;
  std::size_t d2;
  std::size_t l2;
  bool is_c;
  AdaptationReport& rep;
};

std::vector<NodeId> internals_under(const HETree& tree, NodeId r) {
  std::vector<NodeId> out;
  for (NodeId n : tree.subtree(r)) {
    if (!tree.node(n).is_leaf()) out.push_back(n);
  }
  return out;
}

// Item offsets of the new leaves: the equal-count layout for C, the
// placement on the grid over the subtree interval for R.
std::vector<std::size_t> new_offsets(const Ctx& c, std::optional<RangeGrid>& grid) {
  if (c.is_c) return c_leaf_offsets(c.items.size(), c.l2);
  const Interval& iv = c.tree.node(c.r).interval;
  grid.emplace(iv.lower, iv.upper, c.l2, iv.upper_closed);
  std::vector<std::size_t> off(c.l2 + 1, 0);
  for (ObjectRef it : c.items) ++off[grid->leaf_of(c.tree.value(it)) + 1];
  for (std::size_t i = 1; i < off.size(); ++i) off[i] += off[i - 1];
  return off;
}

void remove_all(Ctx& c, const std::vector<NodeId>& ids, std::optional<NodeId> keep = {}) {
  for (NodeId n : ids) {
    if (keep && *keep == n) continue;
    c.tree.remove_node(n);
    ++c.rep.nodes_removed;
  }
}

std::size_t build_internals(Ctx& c, const std::vector<NodeId>& level, NodeId& root,
                            const LevelStatsFn& first = {}) {
  std::size_t before = c.tree.ids_issued();
  root = constr_internal_nodes(c.tree, level, c.d2, c.rep.counters, first);
  return c.tree.ids_issued() - before;
}

// Installs new_root in place of c.r and drops the old subtree nodes.
void install(Ctx& c, NodeId new_root, const std::vector<NodeId>& old_nodes) {
  replace_node(c.tree, c.r, new_root);
  remove_all(c, old_nodes);
  c.rep.new_root = new_root;
}

void do_pow(Ctx& c, const std::vector<std::vector<NodeId>>& lv, std::size_t k) {
  const std::size_t top = lv.size() - 1;
  const std::size_t step = ipow(c.d, k);
  std::size_t prev = 0;
  for (std::size_t j = k; j <= top; j += k) {
    create_edges(c.tree, lv[j], lv[prev], step);
    for (NodeId n : lv[j]) c.tree.mutable_node(n).height = static_cast<int>(j / k);
    prev = j;
  }
  if (prev != top) {
    c.tree.link(c.r, lv[prev]);
    c.tree.mutable_node(c.r).height = static_cast<int>(prev / k + 1);
  }
  for (std::size_t j = 1; j < top; ++j) {
    if (j % k != 0) remove_all(c, lv[j]);
  }
  c.rep.new_root = c.r;
}

void do_mult(Ctx& c, const std::vector<std::vector<NodeId>>& lv, std::size_t k) {
  auto old_internals = internals_under(c.tree, c.r);
  const auto& h1 = lv[1];
  LevelStatsFn fn = [&](std::size_t p, const std::vector<NodeId>&) {
    std::vector<NodeStats> parts;
    for (std::size_t i = p * k; i < std::min(h1.size(), (p + 1) * k); ++i) {
      parts.push_back(c.tree.node(h1[i]).stats);
    }
    return merge_stats(parts);
  };
  std::size_t before = c.tree.ids_issued();
  auto level = build_parent_level(c.tree, c.leaves, c.d2, c.rep.counters, fn);
  std::size_t derived = level.size();
  NodeId root = level.front();
  if (level.size() > 1) root = constr_internal_nodes(c.tree, level, c.d2, c.rep.counters);
  std::size_t built = c.tree.ids_issued() - before;
  c.rep.internals_new = built;
  c.rep.stats_internals_derived = derived;
  c.rep.stats_internals_new = built - derived;
  install(c, root, old_internals);
}

void do_other(Ctx& c) {
  auto old_internals = internals_under(c.tree, c.r);
  NodeId root = 0;
  std::size_t built = build_internals(c, c.leaves, root);
  c.rep.internals_new = built;
  c.rep.stats_internals_new = built;
  install(c, root, old_internals);
}

void do_root(Ctx& c, const std::vector<std::vector<NodeId>>& lv, std::size_t k) {
  const std::size_t top = lv.size() - 1;
  std::size_t before = c.tree.ids_issued();
  for (std::size_t j = 1; j < top; ++j) {
    for (NodeId n : lv[j]) {
      std::vector<NodeId> level = c.tree.node(n).children;
      for (std::size_t t = 1; t < k; ++t) {
        level = build_parent_level(c.tree, level, c.d2, c.rep.counters);
      }
      c.tree.link(n, level);
      c.tree.mutable_node(n).height = static_cast<int>(j * k);
    }
  }
  std::vector<NodeId> level = c.tree.node(c.r).children;
  while (level.size() > c.d2) level = build_parent_level(c.tree, level, c.d2, c.rep.counters);
  c.tree.link(c.r, level);
  c.tree.mutable_node(c.r).height = c.tree.node(level.front()).height + 1;
  std::size_t built = c.tree.ids_issued() - before;
  c.rep.internals_new = built;
  c.rep.stats_internals_new = built;
  c.rep.new_root = c.r;
}

// Leaves from the new offsets. With reuse, stats of old leaves fully inside
// a new leaf are merged instead of rescanned.
std::vector<NodeId> rebuild_leaves(Ctx& c, bool reuse) {
  std::optional<RangeGrid> grid;
  auto off = new_offsets(c, grid);
  std::vector<NodeId> out;
  out.reserve(c.l2);
  std::size_t oi = 0;  // first old leaf that may still be contained
  for (std::size_t j = 0; j < c.l2; ++j) {
    std::size_t a = off[j], b = off[j + 1];
    Node n;
    n.items.assign(c.items.begin() + a, c.items.begin() + b);
    if (grid) {
      n.interval = grid->span(j, j + 1);
    } else {
      n.interval = {c.tree.value(n.items.front()), c.tree.value(n.items.back()), true};
    }
    StatsAccumulator acc;
    bool derived = false;
    std::size_t pos = a;
    if (reuse) {
      while (oi < c.leaves.size() && c.old_offsets[oi] < a) ++oi;
      for (std::size_t i = oi; i < c.leaves.size() && c.old_offsets[i] < b; ++i) {
        std::size_t s = c.old_offsets[i], e = c.old_offsets[i + 1];
        if (s >= a && e <= b && s < e) {
          for (; pos < s; ++pos) {
            acc.add(c.tree.value(c.items[pos]));
            ++c.rep.counters.objects_scanned;
          }
          acc.add(c.tree.node(c.leaves[i]).stats);
          pos = e;
          derived = true;
        }
      }
    }
    for (; pos < b; ++pos) {
      acc.add(c.tree.value(c.items[pos]));
      ++c.rep.counters.objects_scanned;
    }
    n.stats = acc.result();
    if (derived) {
      ++c.rep.stats_leaves_derived;
      ++c.rep.counters.stats_aggregated;
    } else {
      ++c.rep.stats_leaves_new;
      ++c.rep.counters.stats_from_scratch;
    }
    ++c.rep.counters.nodes_built;
    ++c.rep.counters.leaves_built;
    out.push_back(c.tree.add_node(std::move(n)));
  }
  c.rep.leaves_new = out.size();
  return out;
}

void do_rebuild(Ctx& c, bool reuse) {
  auto old_nodes = c.tree.subtree(c.r);
  auto leaves = rebuild_leaves(c, reuse);
  NodeId root = 0;
  std::size_t built = build_internals(c, leaves, root);
  c.rep.internals_new = built;
  c.rep.stats_internals_new = built;
  install(c, root, old_nodes);
}

// Whether merging m consecutive old leaves reproduces the layout of a fresh
// build with l2 leaves.
bool merge_is_exact(const Ctx& c, std::size_t m) {
  std::optional<RangeGrid> grid;
  auto off = new_offsets(c, grid);
  for (std::size_t j = 0; j <= c.l2; ++j) {
    if (off[j] != c.old_offsets[std::min(c.l, j * m)]) return false;
  }
  return true;
}

// New leaves for groups of m old leaves. R intervals are taken from the new
// grid so they match a fresh build bit for bit.
std::vector<NodeId> merged_leaves(Ctx& c, std::size_t m) {
  auto out = merge_leaves(c.tree, c.leaves, m);
  if (!c.is_c) {
    const Interval& iv = c.tree.node(c.r).interval;
    RangeGrid grid(iv.lower, iv.upper, c.l2, iv.upper_closed);
    for (std::size_t j = 0; j < out.size(); ++j) {
      c.tree.mutable_node(out[j]).interval = grid.span(j, j + 1);
    }
  }
  return out;
}

void do_div(Ctx& c, std::size_t m) {
  auto old_nodes = c.tree.subtree(c.r);
  auto leaves = merged_leaves(c, m);
  c.rep.leaves_derived = leaves.size();
  c.rep.stats_leaves_derived = leaves.size();
  c.rep.counters.nodes_built += leaves.size();
  c.rep.counters.leaves_built += leaves.size();
  c.rep.counters.stats_aggregated += leaves.size();
  NodeId root = 0;
  std::size_t built = build_internals(c, leaves, root);
  c.rep.internals_new = built;
  c.rep.stats_internals_new = built;
  install(c, root, old_nodes);
}

void do_div_pow(Ctx& c, const std::vector<std::vector<NodeId>>& lv, std::size_t k) {
  const std::size_t top = lv.size() - 1;
  std::size_t m = ipow(c.d, k);
  auto leaves = merged_leaves(c, m);
  const auto& hk = lv[k];
  for (std::size_t j = 0; j < leaves.size(); ++j) {
    c.tree.mutable_node(leaves[j]).stats = c.tree.node(hk[j]).stats;
  }
  c.rep.leaves_derived = leaves.size();
  c.rep.counters.nodes_built += leaves.size();
  c.rep.counters.leaves_built += leaves.size();
  if (k == top) {
    c.tree.link(c.r, leaves);
    c.tree.mutable_node(c.r).height = 1;
  } else {
    for (std::size_t j = 0; j < leaves.size(); ++j) replace_node(c.tree, hk[j], leaves[j]);
    for (std::size_t h = k + 1; h <= top; ++h) {
      for (NodeId n : lv[h]) {
        Node& node = c.tree.mutable_node(n);
        node.height = static_cast<int>(h - k);
        // R bounds of the retained nodes follow the new grid to the last bit.
        if (!c.is_c && n != c.r) node.interval = hull(c.tree, node.children);
      }
    }
  }
  for (std::size_t h = 0; h <= std::min(k, top); ++h) {
    for (NodeId n : lv[h]) {
      if (n == c.r) continue;
      c.tree.remove_node(n);
      ++c.rep.nodes_removed;
    }
  }
  c.rep.new_root = c.r;
}

void update_ancestors(HETree& tree, NodeId n) {
  auto p = tree.node(n).parent;
  while (p) {
    int h = 0;
    for (NodeId ch : tree.node(*p).children) h = std::max(h, tree.node(ch).height);
    tree.mutable_node(*p).height = h + 1;
    p = tree.node(*p).parent;
  }
}

}  // namespace

AdaptationReport adapt(HETree& tree, std::optional<NodeId> root,
                       std::optional<std::size_t> degree, std::optional<std::size_t> leaves) {
  if (tree.mode() != BuildMode::kFull) {
    throw Error(ErrorCode::kUnsupported, "adaptation needs a fully built tree");
  }
  if (!tree.root()) throw Error(ErrorCode::kInvariant, "tree has no root");
  NodeId r = root.value_or(*tree.root());
  if (!tree.alive(r)) throw Error(ErrorCode::kNotFound, "unknown node " + std::to_string(r));
  if (tree.node(r).is_leaf()) {
    throw Error(ErrorCode::kInvalidOperation, "the reconstruction root must be internal");
  }
  AdaptationReport rep;
  Ctx c{tree, r, tree.is_root(r), tree.leaves_under(r), {}, {}, 0, 0, 0, 0,
        tree.params().variant == Variant::kC, rep};
  c.d = tree.degree_at(r);
  c.l = c.leaves.size();
  c.d2 = degree.value_or(c.d);
  c.l2 = leaves.value_or(c.l);
  if (c.d2 < 2) throw Error(ErrorCode::kParameter, "degree must be >= 2");
  if (c.l2 < 1) throw Error(ErrorCode::kParameter, "number of leaves must be >= 1");
  rep.requested = classify(c.d, c.l, c.d2, c.l2);
  c.old_offsets.push_back(0);
  for (NodeId lf : c.leaves) {
    const auto& it = tree.node(lf).items;
    c.items.insert(c.items.end(), it.begin(), it.end());
    c.old_offsets.push_back(c.items.size());
  }
  if (c.is_c && c.items.size() < c.l2) {
    throw Error(ErrorCode::kParameter, "HETree-C needs at least as many objects as leaves");
  }
  if (!c.is_c && !(tree.node(r).interval.length() > 0)) {
    throw Error(ErrorCode::kDegenerateRange, "the subtree covers a single value");
  }
  rep.m = static_cast<double>(c.items.size());
  rep.e = (static_cast<double>(c.d2) * static_cast<double>(c.l2) - 1.0) /
          (static_cast<double>(c.d2) - 1.0);
  if (rep.requested.kind == AdaptKind::kDegreeRoot) {
    double dk = static_cast<double>(c.d);
    rep.r = (dk * static_cast<double>(c.l2) - 1.0) / (dk - 1.0);
  }

  auto lv = canonical_levels(tree, r, c.d);
  AdaptationCase ex = rep.requested;
  switch (ex.kind) {
    case AdaptKind::kDegreePow:
    case AdaptKind::kDegreeMult:
    case AdaptKind::kDegreeRoot:
      if (!lv) ex = {AdaptKind::kDegreeOther, 0};
      break;
    case AdaptKind::kLeavesDivPow:
      if (!lv) ex = {AdaptKind::kLeavesDiv, ipow(c.d, ex.k)};
      [[fallthrough]];
    case AdaptKind::kLeavesDiv: {
      std::size_t m = ex.kind == AdaptKind::kLeavesDiv ? ex.k : ipow(c.d, ex.k);
      if (!merge_is_exact(c, m)) ex = {AdaptKind::kLeavesMinus, c.l - c.l2};
      break;
    }
    default:
      break;
  }
  rep.executed = ex;

  switch (ex.kind) {
    case AdaptKind::kDegreePow: do_pow(c, *lv, ex.k); break;
    case AdaptKind::kDegreeMult: do_mult(c, *lv, ex.k); break;
    case AdaptKind::kDegreeRoot: do_root(c, *lv, ex.k); break;
    case AdaptKind::kDegreeOther: do_other(c); break;
    case AdaptKind::kLeavesIncrease: do_rebuild(c, false); break;
    case AdaptKind::kLeavesMinus: do_rebuild(c, true); break;
    case AdaptKind::kLeavesDiv: do_div(c, ex.k); break;
    case AdaptKind::kLeavesDivPow: do_div_pow(c, *lv, ex.k); break;
  }

  if (c.whole) {
    tree.set_root(rep.new_root);
    tree.set_params(derive_params(tree.dataset(), tree.params().variant, c.l2, c.d2));
  } else {
    update_ancestors(tree, rep.new_root);
    tree.set_subtree_degree(rep.new_root, c.d2);
  }
  return rep;
}

}  // namespace hetree
