// Acceptance checks. Prints one PASS/FAIL line per criterion and exits 0 when
// every failure is on the known-unattainable list.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ada_oracle.h"
#include "hetree/ada.h"
#include "hetree/bench.h"
#include "hetree/build.h"
#include "hetree/params.h"
#include "hetree/stats.h"
#include "ico_harness.h"
#include "oracles.h"

using namespace hetree;

namespace {

// Tolerances and limits.
constexpr double kPrintedTol = 0.05;     // against values printed to one decimal
constexpr double kExactTol = 1e-9;       // against two-pass recomputation
constexpr double kTinyBuildMs = 1.0;     // ten-object builds
constexpr double kIcoSuiteSecs = 30.0;
constexpr double kAdaSuiteSecs = 60.0;
constexpr double kScalingSecs = 120.0;
constexpr int kScalingRounds = 3;
constexpr double kTenfoldRatio = 13.0;   // construction time, 10x more objects
constexpr double kFivefoldRatio = 6.5;   // construction time, 5x more objects
constexpr int kRandomInstances = 200;    // per scenario and variant

// Criteria that cannot hold as literally stated.
const std::set<std::string> kKnownUnattainable = {"adaptation-examples"};

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail += "; ";
      else detail.clear();
      pass = false;
      detail += what;
    }
  }
};

double secs_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename Fn>
double best_ms(int runs, Fn&& fn) {
  double best = 1e300;
  for (int i = 0; i < runs; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, secs_since(t0) * 1e3);
  }
  return best;
}

std::vector<std::vector<double>> leaf_values(const HETree& t) {
  std::vector<std::vector<double>> out;
  auto lv = t.levels();
  for (NodeId id : lv[0]) {
    std::vector<double> v;
    for (ObjectRef r : t.node(id).items) v.push_back(t.value(r));
    out.push_back(v);
  }
  return out;
}

std::size_t internal_nodes(const HETree& t) {
  std::size_t n = 0;
  for (NodeId id : t.subtree(*t.root())) n += t.node(id).is_leaf() ? 0 : 1;
  return n;
}

Outcome running_example_c() {
  Outcome o;
  auto raw = oracle::people_dataset();
  std::shared_ptr<const Dataset> sorted;
  BuildResult b;
  double ms = best_ms(20, [&] {
    sorted = std::make_shared<const Dataset>(sort_dataset(raw));
    b = build_hetree_c(sorted, 5, 3);
  });
  const HETree& t = b.tree;
  std::vector<std::vector<double>> want = {{20, 30}, {35, 35}, {37, 45}, {50, 55}, {80, 100}};
  o.require(leaf_values(t) == want, "leaf contents");
  const Interval& first = t.node(t.levels()[0][0]).interval;
  o.require(first.lower == 20 && first.upper == 30 && first.upper_closed, "leftmost interval");
  o.require(internal_nodes(t) == 3, "internal node count");
  o.require(t.levels().size() == 3, "height");
  o.require(oracle::check_invariants(t).empty(), "invariants");
  o.require(ms < kTinyBuildMs, "build took " + std::to_string(ms) + " ms");
  if (o.pass) o.detail = "5 leaves as expected, 3 internal nodes, height 2, " + std::to_string(ms) + " ms";
  return o;
}

Outcome running_example_r() {
  Outcome o;
  auto raw = oracle::people_dataset();
  std::shared_ptr<const Dataset> sorted;
  BuildResult b;
  double ms = best_ms(20, [&] {
    sorted = std::make_shared<const Dataset>(sort_dataset(raw));
    b = build_hetree_r(sorted, 5, 3);
  });
  const HETree& t = b.tree;
  o.require(std::fabs(t.params().rho - 16) <= kExactTol, "rho");
  const double bounds[] = {20, 36, 52, 68, 84, 100};
  const auto leaves = t.levels()[0];
  o.require(leaves.size() == 5, "leaf count");
  for (std::size_t i = 0; i < leaves.size() && i < 5; ++i) {
    const Interval& iv = t.node(leaves[i]).interval;
    o.require(std::fabs(iv.lower - bounds[i]) <= kExactTol &&
                  std::fabs(iv.upper - bounds[i + 1]) <= kExactTol && iv.upper_closed == (i == 4),
              "interval " + std::to_string(i));
  }
  // Contents follow the placement formula: 80 < 84 lands in [68, 84).
  std::vector<std::vector<double>> want(5);
  for (double v : oracle::kPeopleAges) want[oracle::bin_of(v, 20, 100, 5)].push_back(v);
  for (auto& w : want) std::sort(w.begin(), w.end());
  std::vector<std::vector<double>> literal = {
      {20, 30, 35, 35}, {37, 45, 50}, {55}, {80}, {100}};
  o.require(want == literal, "oracle binning");
  o.require(leaf_values(t) == want, "leaf contents");
  o.require(oracle::check_invariants(t).empty(), "invariants");
  o.require(ms < kTinyBuildMs, "build took " + std::to_string(ms) + " ms");
  if (o.pass) {
    o.detail = "rho 16, intervals [20,36) [36,52) [52,68) [68,84) [84,100], contents "
               "{20,30,35,35} {37,45,50} {55} {80} {100}, " + std::to_string(ms) + " ms";
  }
  return o;
}

Outcome statistics() {
  Outcome o;
  auto sorted = oracle::sorted_ptr(oracle::people_dataset());
  HETree t = build_hetree_c(sorted, 5, 3).tree;
  const NodeStats& h = t.node(t.levels()[0][4]).stats;
  const NodeStats& c = t.node(t.levels()[1][1]).stats;
  auto dh = oracle::direct_stats({80, 100});
  auto dc = oracle::direct_stats({50, 55, 80, 100});
  o.require(h.count == 2 && std::fabs(h.mean - 90) <= kPrintedTol &&
                std::fabs(h.variance - 100) <= kPrintedTol,
            "leaf vs printed");
  o.require(c.count == 4 && std::fabs(c.mean - 71.3) <= kPrintedTol &&
                std::fabs(c.variance - 404.7) <= kPrintedTol,
            "internal node vs printed");
  o.require(std::fabs(h.mean - dh.mean) <= kExactTol && std::fabs(h.variance - dh.var) <= kExactTol,
            "leaf vs exact");
  o.require(std::fabs(c.mean - 71.25) <= kExactTol && std::fabs(c.variance - 404.6875) <= kExactTol &&
                std::fabs(c.mean - dc.mean) <= kExactTol,
            "internal node vs exact");
  o.require(c.min == 50 && c.max == 100 && h.min == 80 && h.max == 100, "extremes");
  // Every internal node of random trees agrees with a two-pass recomputation.
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50 && o.pass; ++trial) {
    auto vals = oracle::random_values(rng, 50 + rng() % 2000, trial % 3);
    auto s = oracle::sorted_ptr(oracle::make_dataset(vals));
    HETree r = build_hetree(s, derive_params(*s, trial % 2 ? Variant::kR : Variant::kC,
                                             1 + rng() % 100, 2 + rng() % 5))
                   .tree;
    for (NodeId id : r.subtree(*r.root())) {
      std::vector<double> under;
      for (NodeId lf : r.leaves_under(id)) {
        for (ObjectRef x : r.node(lf).items) under.push_back(r.value(x));
      }
      auto d = oracle::direct_stats(under);
      const NodeStats& st = r.node(id).stats;
      if (st.count != d.n || (d.n > 0 && (!oracle::close(st.mean, d.mean, kExactTol) ||
                                          !oracle::close(st.variance, d.var, 1e-7)))) {
        o.require(false, "random tree node stats");
        break;
      }
    }
  }
  if (o.pass) {
    o.detail = "leaf N=2 mean 90 var 100; node N=4 mean 71.25 var 404.6875; 50 random trees agree";
  }
  return o;
}

Outcome parameters() {
  Outcome o;
  TreeParams a = estimate_params(500, {25, 50}, Variant::kC);
  o.require(a.leaves == 16 && a.degree == 4, "500 objects");
  TreeParams b = estimate_params(1000, {25, 50}, Variant::kC);
  o.require(b.leaves == 27 && b.degree == 3, "1000 objects");
  auto c = enumerate_candidates(20, 40);
  o.require(c.size() == 3 && select_setting(c).leaves == 27, "first choice");
  if (c.size() == 3) {
    std::vector<CandidateSetting> rest(c.begin() + 1, c.end());
    CandidateSetting s2 = select_setting(rest);
    o.require(s2.leaves == 25 && s2.degree == 5, "second choice");
    o.require(rest[0].centre_distance == 5 && rest[1].centre_distance == 6, "centre distances");
  }
  if (o.pass) o.detail = "(16,4) and (27,3); without 27 leaves, 25 wins by distance 5 < 6";
  return o;
}

struct IcoSummary {
  Outcome safety, equivalence;
};

IcoSummary ico_checks() {
  using Check = oracle::IcoHarness::Check;
  IcoSummary s;
  auto t0 = std::chrono::steady_clock::now();
  std::size_t scripts = 0;
  auto record = [&](const oracle::IcoHarness& h, const std::string& ctx) {
    for (Check c : {Check::kBounds, Check::kSafety, Check::kMinimality}) {
      if (!h.ok(c)) s.safety.require(false, ctx + ": " + h.report());
    }
    if (!h.ok(Check::kEquivalence)) s.equivalence.require(false, ctx + ": " + h.report());
  };

  // Every script of up to five operations on the ten-object example.
  auto raw = std::make_shared<const Dataset>(oracle::people_dataset());
  std::vector<StartRequest> starts = {StartRequest{}};
  for (int i = 0; i < 10; ++i) starts.push_back({Scenario::kRES, oracle::person(i), 0, 0});
  for (auto [lo, hi] : std::vector<std::pair<double, double>>{
           {30, 50}, {20, 100}, {37, 37}, {56, 70}, {80, 100}, {0, 25}, {45, 60}}) {
    starts.push_back({Scenario::kRAN, "", lo, hi});
  }
  for (Variant v : {Variant::kC, Variant::kR}) {
    for (const StartRequest& req : starts) {
      std::vector<std::vector<int>> frontier = {{}};
      for (int depth = 0; depth <= 5; ++depth) {
        std::vector<std::vector<int>> next;
        for (const auto& script : frontier) {
          oracle::IcoHarness h(raw, v, 5, 3);
          bool started = h.start(req);
          if (started) {
            for (int op : script) h.apply(op);
            h.finish();
            ++scripts;
            for (int op : h.legal()) {
              auto sc = script;
              sc.push_back(op);
              next.push_back(std::move(sc));
            }
          }
          record(h, "example");
          if (!started) break;
        }
        frontier = std::move(next);
      }
    }
  }

  // Random datasets and scripts.
  std::mt19937_64 rng(2024);
  for (Scenario sc : {Scenario::kBSC, Scenario::kRES, Scenario::kRAN}) {
    for (Variant v : {Variant::kC, Variant::kR}) {
      int accepted = 0;
      for (int trial = 0; trial < kRandomInstances; ++trial) {
        std::size_t n = 2 + rng() % 300;
        auto vals = oracle::random_values(rng, n, trial % 3);
        vals[0] = vals[1] + 1;
        auto data = std::make_shared<const Dataset>(oracle::make_dataset(vals));
        std::size_t l = 1 + rng() % std::min<std::size_t>(n, 80);
        std::size_t d = 2 + rng() % 4;
        oracle::IcoHarness h(data, v, l, d);
        StartRequest req;
        req.scenario = sc;
        if (sc == Scenario::kRES) req.resource = (*data)[rng() % n].subject;
        if (sc == Scenario::kRAN) {
          double a = vals[rng() % n], b = vals[rng() % n];
          req.range_lo = std::min(a, b);
          req.range_hi = std::max(a, b);
        }
        if (h.start(req)) {
          ++accepted;
          std::size_t len = rng() % 16;
          for (std::size_t i = 0; i < len; ++i) {
            auto ops = h.legal();
            h.apply(ops[rng() % ops.size()]);
          }
          h.finish();
          ++scripts;
        }
        record(h, std::string(scenario_name(sc)) + "/" + variant_name(v) + " trial " +
                      std::to_string(trial));
      }
      s.safety.require(accepted >= kRandomInstances * 95 / 100,
                       std::string("too few accepted starts for ") + scenario_name(sc));
    }
  }
  double secs = secs_since(t0);
  s.safety.require(secs < kIcoSuiteSecs, "took " + std::to_string(secs) + " s");
  if (s.safety.pass) {
    s.safety.detail = std::to_string(scripts) + " scripts, targets pre-built, union matched, " +
                      "bounds held, " + std::to_string(secs) + " s";
  }
  if (s.equivalence.pass) {
    s.equivalence.detail = std::to_string(scripts) + " scripts, every built node equals its full-tree counterpart";
  }
  return s;
}

Outcome adaptation_equivalence() {
  using namespace oracle;
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(99);
  std::size_t total = 0;
  std::size_t largest_n = 0, largest_l = 0;
  for (AdaptKind kind : kAllKinds) {
    int shortcut = 0;
    for (int trial = 0; trial < 40; ++trial) {
      std::size_t n = trial % 10 == 0 ? 5000 + rng() % 45001 : 20 + rng() % 2000;
      Variant v = trial % 2 ? Variant::kR : Variant::kC;
      auto vals = random_values(rng, n, trial % 3);
      vals[0] = vals[1] + 1;
      Instance in{sorted_ptr(make_dataset(vals)), v, 0, 0};
      std::size_t d, l, d2, l2;
      if (!pick(kind, rng, n, &d, &l, &d2, &l2)) continue;
      largest_n = std::max(largest_n, n);
      largest_l = std::max({largest_l, l, l2});
      HETree t = build(in, l, d);
      std::size_t before = internals_under(t, *t.root());
      auto rep = adapt(t, std::nullopt, d2 != d ? std::optional(d2) : std::nullopt,
                       l2 != l ? std::optional(l2) : std::nullopt);
      ++total;
      if (rep.executed.kind == kind) ++shortcut;
      std::string ctx = std::string(adapt_kind_name(kind)) + " " + variant_name(v) + " n=" +
                        std::to_string(n) + " d=" + std::to_string(d) + "->" +
                        std::to_string(d2) + " l=" + std::to_string(l) + "->" +
                        std::to_string(l2);
      o.require(rep.requested.kind == kind, ctx + " classified differently");
      std::string diff = compare_trees(t, build(in, l2, d2));
      o.require(diff.empty(), ctx + " differs from scratch: " + diff);
      o.require(check_invariants(t).empty(), ctx + " invariants");
      std::size_t after = internals_under(t, *t.root());
      std::string table = check_table(rep, l2, after, count_at_height(t, *t.root(), 1),
                                      after >= before ? after - before : 0);
      o.require(table.empty(), ctx + " cost table: " + table);
      if (rep.executed.kind == AdaptKind::kDegreePow) {
        o.require(rep.counters.nodes_built == 0 &&
                      rep.counters.stats_from_scratch + rep.counters.stats_aggregated == 0,
                  ctx + " built or computed");
      }
      if (rep.executed.kind == AdaptKind::kLeavesDivPow) {
        o.require(rep.stats_leaves_new + rep.stats_leaves_derived == 0, ctx + " leaf stats");
      }
    }
    o.require(shortcut >= 10, std::string("too few executed ") + adapt_kind_name(kind));
  }
  double secs = secs_since(t0);
  o.require(secs < kAdaSuiteSecs, "took " + std::to_string(secs) + " s");
  if (o.pass) {
    o.detail = std::to_string(total) + " adaptations over 8 cases, n up to " +
               std::to_string(largest_n) + ", leaves up to " + std::to_string(largest_l) +
               ", all equal to scratch builds with matching cost cells, " +
               std::to_string(secs) + " s";
  }
  return o;
}

Outcome adaptation_examples() {
  Outcome o;
  auto sorted = oracle::sorted_ptr(oracle::make_dataset(oracle::kEightLeafValues));
  auto fresh = [&] { return build_hetree_c(sorted, 8, 2).tree; };

  // Halving the leaves keeps the root and its children; the new leaves are
  // the old height-1 nodes.
  {
    HETree t = fresh();
    auto lv = t.levels();
    std::vector<NodeStats> mid;
    for (NodeId m : lv[1]) mid.push_back(t.node(m).stats);
    auto rep = adapt(t, std::nullopt, std::nullopt, 4);
    bool ok = rep.executed == AdaptationCase{AdaptKind::kLeavesDivPow, 1} &&
              *t.root() == lv[3][0] &&
              t.node(lv[3][0]).children == std::vector<NodeId>{lv[2][0], lv[2][1]} &&
              oracle::compare_trees(t, build_hetree_c(sorted, 4, 2).tree).empty() &&
              rep.counters.stats_from_scratch + rep.counters.stats_aggregated == 0;
    auto leaves = t.leaves_under(*t.root());
    for (std::size_t i = 0; ok && i < leaves.size(); ++i) {
      ok = t.node(leaves[i]).items.size() == 6 && t.node(leaves[i]).stats.mean == mid[i].mean;
    }
    o.require(ok, "four leaves");
  }
  // Degree 6: same leaves under two new height-1 nodes.
  {
    HETree t = fresh();
    auto lv = t.levels();
    auto rep = adapt(t, std::nullopt, 6, std::nullopt);
    auto now = t.levels();
    bool ok = rep.executed == AdaptationCase{AdaptKind::kDegreeMult, 3} && now.size() == 3 &&
              now[0] == lv[0] && now[1].size() == 2 &&
              t.node(now[1][0]).children.size() == 6 && t.node(now[1][1]).children.size() == 2 &&
              oracle::compare_trees(t, build_hetree_c(sorted, 8, 6).tree).empty();
    o.require(ok, "degree six");
  }
  // Degree 4: the height-2 nodes adopt the leaves directly.
  {
    HETree t = fresh();
    auto lv = t.levels();
    auto rep = adapt(t, std::nullopt, 4, std::nullopt);
    bool ok = rep.executed == AdaptationCase{AdaptKind::kDegreePow, 2} && *t.root() == lv[3][0] &&
              t.node(lv[2][0]).children ==
                  std::vector<NodeId>(lv[0].begin(), lv[0].begin() + 4) &&
              t.node(lv[2][1]).children == std::vector<NodeId>(lv[0].begin() + 4, lv[0].end()) &&
              rep.counters.nodes_built == 0 &&
              oracle::compare_trees(t, build_hetree_c(sorted, 8, 4).tree).empty();
    o.require(ok, "degree four");
  }
  // Five leaves: structure equals a scratch build and the first leaf's mean
  // reuses the first old leaf's statistics plus the raw values 30 and 32.
  {
    HETree t = fresh();
    auto lv = t.levels();
    NodeStats h = t.node(lv[0][0]).stats;
    std::vector<std::vector<ObjectRef>> old_items;
    for (NodeId old : lv[0]) old_items.push_back(t.node(old).items);
    auto rep = adapt(t, std::nullopt, std::nullopt, 5);
    auto leaves = t.leaves_under(*t.root());
    std::vector<double> first;
    for (ObjectRef r : t.node(leaves[0]).items) first.push_back(t.value(r));
    NodeStats expect = merge_stats(h, stats_of_values(std::vector<double>{30, 32}));
    bool ok = rep.executed == AdaptationCase{AdaptKind::kLeavesMinus, 3} &&
              oracle::compare_trees(t, build_hetree_c(sorted, 5, 2).tree).empty() &&
              first == std::vector<double>{20, 25, 28, 30, 32} &&
              std::fabs(t.node(leaves[0]).stats.mean - expect.mean) <= 1e-12 &&
              rep.stats_leaves_derived >= 1;
    o.require(ok, "five leaves");
    // The literal composition: two fully contained old leaves plus 30 and 32
    // of a third. An old leaf holds 3 objects and a new one 5, so at most one
    // old leaf fits whole.
    std::size_t whole = 0;
    const auto& got = t.node(leaves[0]).items;
    for (const auto& items : old_items) {
      bool inside = std::includes(got.begin(), got.end(), items.begin(), items.end());
      whole += inside ? 1 : 0;
    }
    const std::string reproduced =
        o.pass ? "four leaves, degree six, degree four and five leaves reproduced; " : "";
    o.require(whole == 2, "five-leaf composition as stated needs two whole old leaves in the "
                          "first new leaf, but a new leaf spans 1.6 old leaves and holds " +
                              std::to_string(whole));
    o.detail = reproduced + o.detail;
  }
  return o;
}

Outcome scaling() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  BenchOptions opt;
  opt.sizes = {1000, 10000, 100000, 500000};
  opt.dist = Distribution::kUniform;
  opt.variant = Variant::kC;
  opt.repeat = 11;
  // Rounds interleave the sizes so background load hits them alike; the
  // lowest median per size is kept.
  std::vector<BenchRow> rows;
  for (int round = 0; round < kScalingRounds; ++round) {
    for (std::size_t i = 0; i < opt.sizes.size(); ++i) {
      BenchRow r = bench_one(opt.sizes[i], opt);
      if (round == 0) rows.push_back(r);
      else rows[i].construction_ms = std::min(rows[i].construction_ms, r.construction_ms);
    }
  }
  std::string times;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    times += (i ? " / " : "") + std::to_string(rows[i].construction_ms);
    if (i == 0) continue;
    double ratio = rows[i].construction_ms / rows[i - 1].construction_ms;
    double size_ratio = static_cast<double>(rows[i].size) / rows[i - 1].size;
    double limit = size_ratio >= 10 ? kTenfoldRatio : kFivefoldRatio;
    o.require(ratio <= limit, "ratio " + std::to_string(ratio) + " for " +
                                  std::to_string(rows[i - 1].size) + " -> " +
                                  std::to_string(rows[i].size));
    o.require(rows[i].first_response_nodes_ico == rows[0].first_response_nodes_ico,
              "incremental first response grows with the data");
  }
  double secs = secs_since(t0);
  o.require(secs < kScalingSecs, "took " + std::to_string(secs) + " s");
  if (!o.pass) {
    o.detail += " (construction ms " + times + ")";
  } else {
    o.detail = "construction ms " + times + "; incremental first response " +
               std::to_string(rows[0].first_response_nodes_ico) + " nodes at every size; " +
               std::to_string(secs) + " s";
  }
  return o;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"running-example-c", running_example_c},
      {"running-example-r", running_example_r},
      {"statistics", statistics},
      {"parameter-estimation", parameters},
  };
  int unexpected = 0;
  auto report = [&](const std::string& name, const Outcome& o) {
    bool known = !o.pass && kKnownUnattainable.count(name);
    std::printf("%s %s: %s%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                known ? " [known unattainable]" : "");
    std::fflush(stdout);
    if (!o.pass && !known) ++unexpected;
  };
  for (auto& [name, fn] : criteria) report(name, fn());
  IcoSummary ico = ico_checks();
  report("ico-safety-minimality", ico.safety);
  report("ico-full-equivalence", ico.equivalence);
  report("ada-equivalence-cost-table", adaptation_equivalence());
  report("adaptation-examples", adaptation_examples());
  report("scaling", scaling());
  return unexpected == 0 ? 0 : 1;
}
