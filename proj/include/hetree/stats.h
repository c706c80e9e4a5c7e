#ifndef HETREE_STATS_H_
#define HETREE_STATS_H_

#include <cstdint>
#include <span>

namespace hetree {

// Summary of the values under a node. count == 0 marks empty stats; the
// remaining fields are then meaningless. Variance is the population variance.
struct NodeStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double min = 0.0;
  double max = 0.0;

  bool empty() const { return count == 0; }
};

// One pass (Welford) over raw values.
NodeStats stats_of_values(std::span<const double> values);

// Combines partial summaries; empty inputs are skipped.
NodeStats merge_stats(std::span<const NodeStats> parts);
NodeStats merge_stats(const NodeStats& a, const NodeStats& b);

// Incremental accumulator used when values arrive one at a time.
class StatsAccumulator {
 public:
  void add(double x);
  void add(const NodeStats& part);
  const NodeStats& result() const { return stats_; }

 private:
  NodeStats stats_;
};

}  // namespace hetree

#endif  // HETREE_STATS_H_
