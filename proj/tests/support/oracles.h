// Independent reference computations used by the tests. None of these call
// into the library's slicing, binning or merging code.
#ifndef HETREE_TESTS_ORACLES_H_
#define HETREE_TESTS_ORACLES_H_

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hetree/build.h"
#include "hetree/dataset.h"
#include "hetree/tree.h"

namespace oracle {

// The ten ages of the running example, p0 .. p9.
inline const std::vector<double> kPeopleAges = {35, 100, 55, 37, 30, 35, 45, 80, 20, 50};

inline std::string person(int i) { return "http://persons.com/p" + std::to_string(i); }
inline const char* kAge = "http://persons.com/age";

inline hetree::Dataset make_dataset(const std::vector<double>& values,
                                    const std::string& prefix = "http://ex.org/s") {
  std::vector<hetree::DataObject> objs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    objs.push_back({prefix + std::to_string(i), "http://ex.org/v", values[i]});
  }
  return hetree::Dataset(std::move(objs), hetree::ValueKind::kNumeric);
}

inline hetree::Dataset people_dataset() {
  std::vector<hetree::DataObject> objs;
  for (int i = 0; i < 10; ++i) objs.push_back({person(i), kAge, kPeopleAges[i]});
  return hetree::Dataset(std::move(objs), hetree::ValueKind::kNumeric);
}

inline std::shared_ptr<const hetree::Dataset> sorted_ptr(const hetree::Dataset& d) {
  return std::make_shared<const hetree::Dataset>(hetree::sort_dataset(d));
}

// Two-pass population statistics.
struct Direct {
  std::size_t n = 0;
  double mean = 0, var = 0, min = 0, max = 0;
};

inline Direct direct_stats(const std::vector<double>& v) {
  Direct d;
  d.n = v.size();
  if (v.empty()) return d;
  double s = 0;
  d.min = d.max = v[0];
  for (double x : v) {
    s += x;
    d.min = std::min(d.min, x);
    d.max = std::max(d.max, x);
  }
  d.mean = s / v.size();
  double q = 0;
  for (double x : v) q += (x - d.mean) * (x - d.mean);
  d.var = q / v.size();
  return d;
}

inline bool close(double a, double b, double rel = 1e-9) {
  return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Equal-count slices: lambda = ceil(n / l); the first n - l*(lambda-1) slices
// take lambda items, the rest lambda - 1.
inline std::vector<std::size_t> slice_sizes(std::size_t n, std::size_t l) {
  std::size_t lambda = (n + l - 1) / l;
  std::size_t big = n - l * (lambda - 1);
  std::vector<std::size_t> out(l, lambda - 1);
  for (std::size_t i = 0; i < big; ++i) out[i] = lambda;
  return out;
}

// Equal-width bin of v: the j with lo + j*rho <= v < lo + (j+1)*rho, the last
// bin closed at hi.
inline std::size_t bin_of(double v, double lo, double hi, std::size_t l) {
  double rho = (hi - lo) / static_cast<double>(l);
  for (std::size_t j = 0; j + 1 < l; ++j) {
    if (v < lo + static_cast<double>(j + 1) * rho) return j;
  }
  return l - 1;
}

// Number of internal nodes of the bottom-up grouping of l leaves by d.
inline std::size_t internal_count(std::size_t l, std::size_t d) {
  std::size_t total = 0;
  std::size_t level = l;
  do {
    level = (level + d - 1) / d;
    total += level;
  } while (level > 1);
  return total;
}

inline int height_of(std::size_t l, std::size_t d) {
  int h = 0;
  std::size_t level = l;
  do {
    level = (level + d - 1) / d;
    ++h;
  } while (level > 1);
  return h;
}

// Structural summary of one node, independent of ids.
struct NodeSig {
  int height = 0;
  double lower = 0, upper = 0;
  bool upper_closed = true;
  std::vector<hetree::ObjectRef> items;  // leaves only
  std::size_t children = 0;
  hetree::NodeStats stats;
};

// Level by level, left to right.
inline std::vector<std::vector<NodeSig>> signature(const hetree::HETree& t) {
  std::vector<std::vector<NodeSig>> out;
  for (const auto& level : t.levels()) {
    std::vector<NodeSig> row;
    for (hetree::NodeId id : level) {
      const hetree::Node& n = t.node(id);
      row.push_back({n.height, n.interval.lower, n.interval.upper, n.interval.upper_closed,
                     n.items, n.children.size(), n.stats});
    }
    out.push_back(std::move(row));
  }
  return out;
}

inline bool same_stats(const hetree::NodeStats& a, const hetree::NodeStats& b,
                       std::string* why = nullptr) {
  if (a.count != b.count) {
    if (why) *why = "count " + std::to_string(a.count) + " vs " + std::to_string(b.count);
    return false;
  }
  if (a.count == 0) return true;
  bool ok = close(a.mean, b.mean) && close(a.variance, b.variance, 1e-7) &&
            a.min == b.min && a.max == b.max;
  if (!ok && why) {
    *why = "stats mean " + std::to_string(a.mean) + " vs " + std::to_string(b.mean) +
           " var " + std::to_string(a.variance) + " vs " + std::to_string(b.variance);
  }
  return ok;
}

// Empty string when equal, else the first difference.
inline std::string compare_trees(const hetree::HETree& a, const hetree::HETree& b) {
  auto sa = signature(a), sb = signature(b);
  if (sa.size() != sb.size()) {
    return "height " + std::to_string(sa.size()) + " vs " + std::to_string(sb.size());
  }
  for (std::size_t h = 0; h < sa.size(); ++h) {
    if (sa[h].size() != sb[h].size()) {
      return "level " + std::to_string(h) + " width " + std::to_string(sa[h].size()) +
             " vs " + std::to_string(sb[h].size());
    }
    for (std::size_t i = 0; i < sa[h].size(); ++i) {
      const NodeSig& x = sa[h][i];
      const NodeSig& y = sb[h][i];
      std::string at = "level " + std::to_string(h) + " node " + std::to_string(i) + ": ";
      if (x.height != y.height) return at + "height";
      if (!close(x.lower, y.lower) || !close(x.upper, y.upper)) {
        return at + "interval [" + std::to_string(x.lower) + "," + std::to_string(x.upper) +
               "] vs [" + std::to_string(y.lower) + "," + std::to_string(y.upper) + "]";
      }
      if (x.upper_closed != y.upper_closed) return at + "closedness";
      if (x.items != y.items) return at + "items";
      if (x.children != y.children) return at + "child count";
      std::string why;
      if (!same_stats(x.stats, y.stats, &why)) return at + why;
    }
  }
  return "";
}

// Checks the structural invariants every tree must satisfy. Empty string if ok.
// A subtree adaptation may change the subtree's height, so `balanced` = false
// only requires children to sit strictly below their parent.
inline std::string check_invariants(const hetree::HETree& t, bool balanced = true) {
  if (!t.root()) return "no root";
  for (const auto& level : t.levels()) {
    for (std::size_t i = 0; i < level.size(); ++i) {
      const hetree::Node& n = t.node(level[i]);
      if (n.is_leaf() != n.children.empty()) return "leaf/children mismatch";
      if (!n.is_leaf() && !n.items.empty()) return "internal node with items";
      for (std::size_t k = 1; k < n.items.size(); ++k) {
        if (t.value(n.items[k - 1]) > t.value(n.items[k])) return "unsorted leaf";
      }
      for (hetree::ObjectRef r : n.items) {
        if (!n.interval.contains(t.value(r))) return "object outside leaf interval";
      }
      if (!n.is_leaf()) {
        const auto& c = n.children;
        if (c.size() > t.degree_at(level[i])) return "too many children";
        if (t.node(c.front()).interval.lower != n.interval.lower ||
            t.node(c.back()).interval.upper != n.interval.upper) {
          return "interval is not the children's hull";
        }
        for (hetree::NodeId ch : c) {
          if (!t.node(ch).parent || *t.node(ch).parent != level[i]) return "parent link";
          int ch_h = t.node(ch).height;
          if (balanced ? ch_h != n.height - 1 : ch_h >= n.height) return "child height";
        }
      }
      if (i > 0 && t.node(level[i - 1]).interval.lower > n.interval.lower) {
        return "level not ordered";
      }
    }
  }
  return "";
}

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, int kind) {
  std::vector<double> v(n);
  std::uniform_real_distribution<double> u(0, 1000);
  std::normal_distribution<double> g(500, 120);
  std::uniform_int_distribution<int> small(0, 40);
  for (auto& x : v) {
    if (kind == 0) x = std::round(u(rng) * 100) / 100;
    else if (kind == 1) x = std::round(g(rng));
    else x = small(rng);  // many ties
  }
  return v;
}

}  // namespace oracle

#endif  // HETREE_TESTS_ORACLES_H_
