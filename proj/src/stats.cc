#include "hetree/stats.h"

#include <algorithm>

namespace hetree {

void StatsAccumulator::add(double x) {
  NodeStats& s = stats_;
  if (s.count == 0) {
    s = {1, x, 0.0, x, x};
    return;
  }
  // Welford keeps the running sum of squared deviations in variance * count.
  double m2 = s.variance * static_cast<double>(s.count);
  ++s.count;
  double delta = x - s.mean;
  s.mean += delta / static_cast<double>(s.count);
  m2 += delta * (x - s.mean);
  s.variance = m2 / static_cast<double>(s.count);
  s.min = std::min(s.min, x);
  s.max = std::max(s.max, x);
}

void StatsAccumulator::add(const NodeStats& part) { stats_ = merge_stats(stats_, part); }

NodeStats stats_of_values(std::span<const double> values) {
  StatsAccumulator acc;
  for (double v : values) acc.add(v);
  return acc.result();
}

NodeStats merge_stats(const NodeStats& a, const NodeStats& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  NodeStats out;
  double na = static_cast<double>(a.count);
  double nb = static_cast<double>(b.count);
  out.count = a.count + b.count;
  double n = static_cast<double>(out.count);
  out.mean = (na * a.mean + nb * b.mean) / n;
  double da = a.mean - out.mean;
  double db = b.mean - out.mean;
  out.variance = (na * a.variance + nb * b.variance + na * da * da + nb * db * db) / n;
  out.min = std::min(a.min, b.min);
  out.max = std::max(a.max, b.max);
  return out;
}

NodeStats merge_stats(std::span<const NodeStats> parts) {
  // Single pass over all parts, as in the weighted formulas for N, mu and
  // sigma^2 over children.
  NodeStats out;
  double n = 0, weighted_mean = 0;
  for (const NodeStats& p : parts) {
    if (p.empty()) continue;
    if (out.count == 0) {
      out.min = p.min;
      out.max = p.max;
    } else {
      out.min = std::min(out.min, p.min);
      out.max = std::max(out.max, p.max);
    }
    out.count += p.count;
    n += static_cast<double>(p.count);
    weighted_mean += static_cast<double>(p.count) * p.mean;
  }
  if (out.count == 0) return out;
  out.mean = weighted_mean / n;
  double acc = 0;
  for (const NodeStats& p : parts) {
    if (p.empty()) continue;
    double dev = p.mean - out.mean;
    acc += static_cast<double>(p.count) * (p.variance + dev * dev);
  }
  out.variance = acc / n;
  if (out.count == 1) out.variance = 0;
  out.mean = std::clamp(out.mean, out.min, out.max);
  return out;
}

}  // namespace hetree
