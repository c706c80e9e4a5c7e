#include "hetree/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "hetree/build.h"
#include "hetree/explore.h"

namespace hetree {

const char* distribution_name(Distribution d) {
  switch (d) {
    case Distribution::kUniform: return "uniform";
    case Distribution::kNormal: return "normal";
    case Distribution::kZipf: return "zipf";
  }
  return "?";
}

std::optional<Distribution> parse_distribution(const std::string& name) {
  if (name == "uniform") return Distribution::kUniform;
  if (name == "normal") return Distribution::kNormal;
  if (name == "zipf") return Distribution::kZipf;
  return std::nullopt;
}

namespace {

// glibc serves blocks above a moving threshold straight from mmap and hands
// them back on free, so only the larger sizes would pay fresh page faults on
// every run. Keeping everything in the heap times all sizes alike.
void keep_heap_warm() {
#if defined(__GLIBC__)
  static const bool done = [] {
    mallopt(M_MMAP_THRESHOLD, 32 << 20);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);
    return true;
  }();
  (void)done;
#endif
}

constexpr std::size_t kZipfRanks = 100000;
constexpr double kZipfS = 1.1;

// Inverse-CDF sampler over ranks 1..n with P(k) proportional to k^-s.
class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double s) : cdf_(n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += std::pow(static_cast<double>(k + 1), -s);
      cdf_[k] = acc;
    }
    for (double& c : cdf_) c /= acc;
  }

  std::size_t operator()(std::mt19937_64& rng) {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                                             cdf_.size() - 1)) + 1;
  }

 private:
  std::vector<double> cdf_;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

template <typename Fn>
double time_ms(Fn&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

Dataset generate_dataset(Distribution dist, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<DataObject> objs;
  objs.reserve(n);
  const std::string pred = "http://example.org/value";
  auto subject = [](std::size_t i) { return "http://example.org/s" + std::to_string(i); };
  switch (dist) {
    case Distribution::kUniform: {
      std::uniform_real_distribution<double> u(0.0, 1e6);
      for (std::size_t i = 0; i < n; ++i) objs.push_back({subject(i), pred, u(rng)});
      break;
    }
    case Distribution::kNormal: {
      std::normal_distribution<double> g(5e5, 1e5);
      for (std::size_t i = 0; i < n; ++i) objs.push_back({subject(i), pred, g(rng)});
      break;
    }
    case Distribution::kZipf: {
      ZipfSampler z(kZipfRanks, kZipfS);
      for (std::size_t i = 0; i < n; ++i) {
        objs.push_back({subject(i), pred, static_cast<double>(z(rng))});
      }
      break;
    }
  }
  return Dataset(std::move(objs), ValueKind::kNumeric);
}

std::string bench_csv_header() {
  return "size,dist,variant,leaves,degree,construction_ms,ico_init_ms,"
         "first_response_nodes_full,first_response_nodes_ico,init_nodes_bsc,"
         "init_nodes_res,init_nodes_ran";
}

std::string bench_csv_row(const BenchRow& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << r.size << ',' << distribution_name(r.dist) << ',' << variant_name(r.variant) << ','
     << r.leaves << ',' << r.degree << ',' << r.construction_ms << ',' << r.ico_init_ms << ','
     << r.first_response_nodes_full << ',' << r.first_response_nodes_ico << ','
     << r.init_nodes_bsc << ',' << r.init_nodes_res << ',' << r.init_nodes_ran;
  return os.str();
}

BenchRow bench_one(std::size_t size, const BenchOptions& o) {
  keep_heap_warm();
  BenchRow row;
  row.size = size;
  row.dist = o.dist;
  row.variant = o.variant;
  auto raw = std::make_shared<const Dataset>(generate_dataset(o.dist, size, o.seed + size));
  TreeParams p = estimate_params(size, o.bounds, o.variant);
  row.leaves = p.leaves;
  row.degree = p.degree;

  // Every repeat times a fresh sample: re-sorting identical input lets the
  // branch predictor learn it and makes small sizes look unrealistically fast.
  std::vector<double> build_ms, ico_ms;
  for (std::size_t i = 0; i < std::max<std::size_t>(1, o.repeat); ++i) {
    auto sample = i == 0 ? raw
                         : std::make_shared<const Dataset>(
                               generate_dataset(o.dist, size, o.seed + size + 7919 * i));
    BuildCounters c;
    build_ms.push_back(time_ms([&] {
      auto sorted = std::make_shared<const Dataset>(sort_dataset(*sample));
      c = build_hetree(sorted, p).counters;
    }));
    ico_ms.push_back(time_ms([&] {
      auto s = ExplorationSession::start_incremental(sample, o.variant, p.leaves, p.degree,
                                                     {Scenario::kBSC, {}, 0, 0});
      if (i == 0) row.first_response_nodes_ico = s.counters().nodes_built;
    }));
    if (i == 0) row.first_response_nodes_full = c.nodes_built;
  }
  row.construction_ms = median(build_ms);
  row.ico_init_ms = median(ico_ms);
  row.init_nodes_bsc = row.first_response_nodes_ico;

  // RES on the object holding the median value, RAN on a narrow band in the
  // middle of the value range.
  std::vector<std::size_t> idx(raw->size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::nth_element(idx.begin(), idx.begin() + idx.size() / 2, idx.end(),
                   [&](std::size_t a, std::size_t b) { return raw->value(a) < raw->value(b); });
  StartRequest res{Scenario::kRES, (*raw)[idx[idx.size() / 2]].subject, 0, 0};
  row.init_nodes_res = ExplorationSession::start_incremental(raw, o.variant, p.leaves,
                                                             p.degree, res)
                           .counters()
                           .nodes_built;
  double lo = raw->minv() + 0.45 * (raw->maxv() - raw->minv());
  double hi = raw->minv() + 0.50 * (raw->maxv() - raw->minv());
  StartRequest ran{Scenario::kRAN, {}, lo, hi};
  row.init_nodes_ran = ExplorationSession::start_incremental(raw, o.variant, p.leaves,
                                                             p.degree, ran)
                           .counters()
                           .nodes_built;
  return row;
}

std::vector<BenchRow> run_bench(const BenchOptions& o) {
  std::vector<BenchRow> rows;
  for (std::size_t n : o.sizes) rows.push_back(bench_one(n, o));
  return rows;
}

}  // namespace hetree
