#include "hetree/explore.h"

#include <algorithm>
#include <cctype>
#include <limits>

#include "hetree/error.h"

namespace hetree {

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kBSC: return "BSC";
    case Scenario::kRES: return "RES";
    case Scenario::kRAN: return "RAN";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(const std::string& name) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) {
    return static_cast<char>(std::toupper(c));
  });
  if (up == "BSC") return Scenario::kBSC;
  if (up == "RES") return Scenario::kRES;
  if (up == "RAN") return Scenario::kRAN;
  return std::nullopt;
}

StartingPoint resolve_start(const Dataset& data, const StartRequest& req) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "dataset is empty");
  StartingPoint sp;
  sp.scenario = req.scenario;
  switch (req.scenario) {
    case Scenario::kBSC:
      sp.u = {data.minv(), data.maxv(), true};
      break;
    case Scenario::kRES: {
      double best = std::numeric_limits<double>::infinity();
      bool found = false;
      for (std::size_t i = 0; i < data.size(); ++i) {
        if ((!found || data.value(i) < best) && data[i].subject == req.resource) {
          best = data.value(i);
          found = true;
        }
      }
      if (!found) throw Error(ErrorCode::kNotFound, "unknown resource " + req.resource);
      sp.u = {best, best, true};
      sp.resource = req.resource;
      break;
    }
    case Scenario::kRAN: {
      double lo = std::max(data.minv(), req.range_lo);
      double hi = std::min(data.maxv(), req.range_hi);
      if (!(req.range_lo <= req.range_hi) || lo > hi) {
        throw Error(ErrorCode::kEmptyRange, "range does not intersect the data");
      }
      sp.u = {lo, hi, true};
      break;
    }
  }
  return sp;
}

ExplorationSession ExplorationSession::start(std::shared_ptr<const HETree> tree,
                                             const StartRequest& req,
                                             const BuildCounters& build) {
  if (!tree || !tree->root()) throw Error(ErrorCode::kPrecondition, "tree has no root");
  ExplorationSession s;
  s.tree_ = std::move(tree);
  s.start_ = resolve_start(s.tree_->dataset(), req);
  s.cur_ = s.initial_full(s.start_);
  s.counters_ = build;
  s.last_step_ = build;
  s.push("start");
  return s;
}

ExplorationSession ExplorationSession::start_incremental(std::shared_ptr<const Dataset> data,
                                                         Variant variant,
                                                         std::size_t leaves,
                                                         std::size_t degree,
                                                         const StartRequest& req) {
  ExplorationSession s;
  s.ico_ = std::make_shared<IcoState>(std::move(data), variant, leaves, degree);
  s.start_ = resolve_start(s.ico_->tree().dataset(), req);
  s.cur_ = s.ico_->init(s.start_);
  s.counters_ = s.ico_->counters();
  s.last_step_ = s.counters_;
  s.push("start");
  return s;
}

const HETree& ExplorationSession::tree() const { return ico_ ? ico_->tree() : *tree_; }

RenderedSet ExplorationSession::initial_full(const StartingPoint& start) const {
  const HETree& t = *tree_;
  RenderedSet rs;
  switch (start.scenario) {
    case Scenario::kBSC:
      rs.nodes = {*t.root()};
      break;
    case Scenario::kRES: {
      for (NodeId leaf : t.leaves_under(*t.root())) {
        for (ObjectRef r : t.node(leaf).items) {
          const DataObject& o = t.object(r);
          if (o.value == start.u.lower && o.subject == *start.resource) {
            rs.kind = RenderedSet::Kind::kObjects;
            rs.nodes = {leaf};
            rs.focus_leaf = leaf;
            return rs;
          }
        }
      }
      throw Error(ErrorCode::kNotFound, "resource not present in the tree");
    }
    case Scenario::kRAN: {
      auto levels = t.levels();
      for (std::size_t h = 1; h < levels.size(); ++h) {
        for (NodeId n : levels[h]) {
          if (!t.node(n).interval.contains(start.u.lower, start.u.upper)) continue;
          if (t.node(n).stats.empty()) {
            throw Error(ErrorCode::kEmptyRange, "no objects under the node covering the range");
          }
          rs.nodes = t.node(n).children;
          return rs;
        }
      }
      rs.nodes = t.node(*t.root()).children;
      break;
    }
  }
  return rs;
}

void ExplorationSession::push(std::string op) { history_.push_back({std::move(op), cur_}); }

const RenderedSet& ExplorationSession::drill_down(NodeId id) {
  if (cur_.kind == RenderedSet::Kind::kObjects) {
    throw Error(ErrorCode::kInvalidOperation, "cannot drill below data objects");
  }
  if (std::find(cur_.nodes.begin(), cur_.nodes.end(), id) == cur_.nodes.end()) {
    throw Error(ErrorCode::kStaleOperation,
                "node " + std::to_string(id) + " is not currently rendered");
  }
  const HETree& t = tree();
  RenderedSet next;
  if (t.node(id).is_leaf()) {
    next.kind = RenderedSet::Kind::kObjects;
    next.nodes = {id};
    next.focus_leaf = id;
  } else {
    next.nodes = t.node(id).children;
  }
  cur_ = std::move(next);
  last_step_ = ico_ ? ico_->step(cur_) : BuildCounters{};
  if (ico_) counters_ = ico_->counters();
  push("drill " + std::to_string(id));
  return cur_;
}

const RenderedSet& ExplorationSession::roll_up() {
  const HETree& t = tree();
  RenderedSet next;
  if (cur_.kind == RenderedSet::Kind::kObjects) {
    next.nodes = t.sibling_group(*cur_.focus_leaf);
  } else {
    NodeId first = cur_.nodes.front();
    auto parent = t.node(first).parent;
    if (!parent) {
      if (t.is_root(first)) throw Error(ErrorCode::kTopOfTree, "already at the root");
      throw Error(ErrorCode::kInvariant, "rendered group has no parent");
    }
    next.nodes = t.sibling_group(*parent);
  }
  cur_ = std::move(next);
  last_step_ = ico_ ? ico_->step(cur_) : BuildCounters{};
  if (ico_) counters_ = ico_->counters();
  push("rollup");
  return cur_;
}

AdaptationReport ExplorationSession::adapt(std::optional<NodeId> root,
                                           std::optional<std::size_t> degree,
                                           std::optional<std::size_t> leaves) {
  if (ico_) {
    throw Error(ErrorCode::kUnsupported, "adaptation is available for fully built trees only");
  }
  if (degree.has_value() == leaves.has_value()) {
    throw Error(ErrorCode::kUnsupported, "give exactly one of degree and leaves");
  }
  auto copy = std::make_shared<HETree>(*tree_);
  AdaptationReport rep = hetree::adapt(*copy, root, degree, leaves);
  tree_ = std::move(copy);
  counters_ += rep.counters;
  last_step_ = rep.counters;
  cur_ = RenderedSet{};
  cur_.nodes = tree_->node(rep.new_root).children;
  std::string op = "adapt";
  if (degree) op += " degree " + std::to_string(*degree);
  if (leaves) op += " leaves " + std::to_string(*leaves);
  if (root) op += " root " + std::to_string(*root);
  push(std::move(op));
  return rep;
}

}  // namespace hetree
